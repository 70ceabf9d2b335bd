#include "adaptswarm/nn/serialize.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::nn {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'D', 'R', 'L'};

enum : std::uint8_t { kFlatten = 0, kDense = 1, kGru = 2 };

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double d) {
        const auto bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    void f64s(std::span<const double> values) {
        for (double d : values) f64(d);
    }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    std::vector<std::uint8_t>& buffer() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, std::size_t base = 0) : bytes_(bytes), base_(base) {}

    std::size_t offset() const { return base_ + pos_; }
    bool done() const { return pos_ == bytes_.size(); }

    void need(std::size_t n, const char* what) {
        if (bytes_.size() - pos_ < n) throw ParseError(std::string("truncated stream while reading ") + what, offset());
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return bytes_[pos_++];
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64(const char* what) {
        need(8, what);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }
    void f64s(std::span<double> out, const char* what) {
        need(out.size() * 8, what);
        for (double& d : out) d = f64(what);
    }
    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

void write_gru(Writer& w, const GruParams& p) {
    w.u32(static_cast<std::uint32_t>(p.inputs()));
    w.u32(static_cast<std::uint32_t>(p.hidden()));
    w.f64s(p.w_z.values());
    w.f64s(p.u_z.values());
    w.f64s(p.b_z);
    w.f64s(p.w_r.values());
    w.f64s(p.u_r.values());
    w.f64s(p.b_r);
    w.f64s(p.w_h.values());
    w.f64s(p.u_h.values());
    w.f64s(p.b_h);
}

GruParams read_gru(Reader& r) {
    const std::uint32_t inputs = r.u32("GRU input width");
    const std::uint32_t hidden = r.u32("GRU hidden size");
    const std::size_t expected =
        (3ull * hidden * inputs + 3ull * hidden * hidden + 3ull * hidden) * sizeof(double);
    r.need(expected, "GRU parameters");
    GruParams p = GruParams::zeros(inputs, hidden);
    r.f64s(p.w_z.values(), "W_z");
    r.f64s(p.u_z.values(), "U_z");
    r.f64s(p.b_z, "b_z");
    r.f64s(p.w_r.values(), "W_r");
    r.f64s(p.u_r.values(), "U_r");
    r.f64s(p.b_r, "b_r");
    r.f64s(p.w_h.values(), "W_h");
    r.f64s(p.u_h.values(), "U_h");
    r.f64s(p.b_h, "b_h");
    return p;
}

}  // namespace

std::vector<std::uint8_t> save_params(const Network& net) {
    Writer w;
    for (std::uint8_t b : kMagic) w.u8(b);
    w.u8(kParamFormatVersion);
    w.u32(static_cast<std::uint32_t>(net.input_width()));
    w.u32(static_cast<std::uint32_t>(net.input_steps()));
    w.u32(static_cast<std::uint32_t>(net.layers().size()));
    for (const Layer& layer : net.layers()) {
        Writer body;
        if (std::holds_alternative<FlattenLayer>(layer)) {
            body.u8(kFlatten);
        } else if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            body.u8(kDense);
            body.u8(static_cast<std::uint8_t>(d->activation));
            body.u32(static_cast<std::uint32_t>(d->params.weights.rows()));
            body.u32(static_cast<std::uint32_t>(d->params.weights.cols()));
            body.f64s(d->params.weights.values());
            body.f64s(d->params.bias);
        } else if (const auto* g = std::get_if<GruLayer>(&layer)) {
            body.u8(kGru);
            write_gru(body, g->params);
        }
        w.u32(static_cast<std::uint32_t>(body.buffer().size()));
        w.bytes(body.buffer());
    }
    return std::move(w.buffer());
}

Network load_params(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.need(4, "magic");
    for (std::uint8_t expected : kMagic) {
        const std::size_t at = r.offset();
        if (r.u8("magic") != expected) throw ParseError("bad magic, not an ADRL parameter stream", at);
    }
    const std::uint8_t version = r.u8("format version");
    if (version != kParamFormatVersion) throw VersionError(version, kParamFormatVersion);
    const std::uint32_t input_width = r.u32("input width");
    const std::uint32_t input_steps = r.u32("input steps");
    const std::uint32_t count = r.u32("layer count");

    std::vector<Layer> layers;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t length = r.u32("layer record length");
        const std::size_t body_start = r.offset();
        Reader body(r.take(length, "layer record"), body_start);
        const std::uint8_t kind = body.u8("layer kind");
        switch (kind) {
            case kFlatten:
                layers.emplace_back(FlattenLayer{});
                break;
            case kDense: {
                const std::size_t act_at = body.offset();
                const std::uint8_t act = body.u8("activation");
                if (act > static_cast<std::uint8_t>(Activation::softmax)) {
                    throw ParseError("unknown activation tag " + std::to_string(act), act_at);
                }
                const std::uint32_t rows = body.u32("dense rows");
                const std::uint32_t cols = body.u32("dense cols");
                body.need((static_cast<std::size_t>(rows) * cols + rows) * sizeof(double), "dense parameters");
                DenseLayer d;
                d.activation = static_cast<Activation>(act);
                d.params.weights = Matrix(rows, cols);
                d.params.bias.assign(rows, 0.0);
                body.f64s(d.params.weights.values(), "dense weights");
                body.f64s(d.params.bias, "dense bias");
                layers.emplace_back(std::move(d));
                break;
            }
            case kGru:
                layers.emplace_back(GruLayer{read_gru(body)});
                break;
            default:
                throw ParseError("unknown layer kind " + std::to_string(kind), body_start);
        }
        if (!body.done()) throw ParseError("layer record has trailing bytes", body.offset());
    }
    if (!r.done()) throw ParseError("trailing bytes after last layer", r.offset());

    try {
        return Network(input_width, std::move(layers), input_steps);
    } catch (const DimensionError& e) {
        throw ParseError(std::string("inconsistent layer shapes: ") + e.what(), r.offset());
    }
}

}  // namespace adaptswarm::nn
