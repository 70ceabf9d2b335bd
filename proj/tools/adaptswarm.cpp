#include <csignal>
#include <cstdlib>
#include <string>
#include <vector>

#include "adaptswarm/harness/cli.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

extern "C" void on_interrupt(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);

    adaptswarm::harness::CliContext ctx;
    ctx.should_stop = [] { return g_stop != 0; };
    if (const char* out = std::getenv("ADAPT_SWARM_OUT")) ctx.env_out = out;
    return adaptswarm::harness::run_cli(std::vector<std::string>(argv + 1, argv + argc), ctx);
}
