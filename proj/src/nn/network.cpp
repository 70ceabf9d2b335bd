#include "adaptswarm/nn/network.hpp"

#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::nn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool next_is_gru(const std::vector<Layer>& layers, std::size_t i) {
    return i + 1 < layers.size() && std::holds_alternative<GruLayer>(layers[i + 1]);
}

Vector concat_rows(const Matrix& m) { return Vector(m.values().begin(), m.values().end()); }

}  // namespace

void add_scaled(Gradients& into, const Gradients& g, double scale) {
    if (into.size() != g.size()) {
        throw DimensionError("gradient block count " + std::to_string(into.size()) + " vs " +
                             std::to_string(g.size()));
    }
    for (std::size_t b = 0; b < g.size(); ++b) {
        if (into[b].size() != g[b].size()) {
            throw DimensionError("gradient block " + std::to_string(b) + " has length " +
                                 std::to_string(into[b].size()) + " vs " + std::to_string(g[b].size()));
        }
        for (std::size_t i = 0; i < g[b].size(); ++i) into[b][i] += scale * g[b][i];
    }
}

Network::Network(std::size_t input_width, std::vector<Layer> layers, std::size_t input_steps)
    : input_width_(input_width), input_steps_(input_steps), layers_(std::move(layers)) {
    validate();
}

void Network::validate() {
    if (input_width_ == 0 || input_steps_ == 0) throw DimensionError("network input shape must be positive");
    if (layers_.empty()) throw DimensionError("network needs at least one layer");

    std::size_t width = input_width_;
    std::size_t steps = input_steps_;
    bool sequence = true;
    std::size_t gru_count = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        std::visit(Overloaded{
                       [&](const FlattenLayer&) {
                           if (!sequence) throw DimensionError("flatten must precede dense and GRU layers");
                           if (!next_is_gru(layers_, i)) {
                               width *= steps;
                               steps = 1;
                               sequence = false;
                           }
                       },
                       [&](const GruLayer& g) {
                           ++gru_count;
                           const bool first = i == 0 || (i == 1 && std::holds_alternative<FlattenLayer>(layers_[0]));
                           if (!first || gru_count > 1) {
                               throw DimensionError("a network holds at most one GRU layer, placed first after flatten");
                           }
                           g.params.validate();
                           if (g.params.inputs() != width) {
                               throw DimensionError("GRU expects input width " + std::to_string(g.params.inputs()) +
                                                    " but receives " + std::to_string(width));
                           }
                           width = g.params.hidden();
                           sequence = false;
                           steps = 1;
                           recurrent_ = true;
                       },
                       [&](const DenseLayer& d) {
                           if (sequence && steps != 1) {
                               throw DimensionError("dense layer cannot consume a " + std::to_string(steps) +
                                                    "-step sequence without flatten");
                           }
                           if (d.params.weights.cols() != width) {
                               throw DimensionError("dense weights " + d.params.weights.shape_string() +
                                                    " incompatible with input width " + std::to_string(width));
                           }
                           if (d.params.bias.size() != d.params.weights.rows()) {
                               throw DimensionError("dense bias length " + std::to_string(d.params.bias.size()) +
                                                    " does not match weights " + d.params.weights.shape_string());
                           }
                           width = d.params.weights.rows();
                           sequence = false;
                           steps = 1;
                       },
                   },
                   layers_[i]);
    }
    output_width_ = width;
}

Vector Network::forward(std::span<const double> single_step) const {
    return forward(Matrix::row_vector(single_step));
}

Vector Network::forward(const Matrix& input, Tape* tape) const {
    if (input.cols() != input_width_) {
        throw DimensionError("network expects input width " + std::to_string(input_width_) + ", got " +
                             input.shape_string());
    }
    if (input.rows() == 0 || (!recurrent_ && input.rows() != input_steps_)) {
        throw DimensionError("network expects " + std::to_string(input_steps_) + " input step(s), got " +
                             input.shape_string());
    }
    if (tape != nullptr) {
        tape->owner = this;
        tape->generation = generation_;
        tape->layers.assign(layers_.size(), Tape::LayerRecord{});
    }

    Matrix seq = input;
    Vector vec;
    bool is_sequence = true;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Tape::LayerRecord* rec = tape != nullptr ? &tape->layers[i] : nullptr;
        std::visit(Overloaded{
                       [&](const FlattenLayer&) {
                           if (!next_is_gru(layers_, i)) {
                               vec = concat_rows(seq);
                               is_sequence = false;
                           }
                       },
                       [&](const GruLayer& g) {
                           const Vector h0(g.params.hidden(), 0.0);
                           if (rec != nullptr) rec->input = seq;
                           vec = gru_sequence_forward(g.params, seq, h0, rec != nullptr ? &rec->steps : nullptr);
                           is_sequence = false;
                       },
                       [&](const DenseLayer& d) {
                           if (is_sequence) {
                               vec = concat_rows(seq);
                               is_sequence = false;
                           }
                           Vector pre = dense_forward(d.params, vec);
                           Vector out = activate(d.activation, pre);
                           if (rec != nullptr) {
                               rec->input = Matrix::row_vector(vec);
                               rec->pre = std::move(pre);
                               rec->output = out;
                           }
                           vec = std::move(out);
                       },
                   },
                   layers_[i]);
    }
    if (is_sequence) vec = concat_rows(seq);
    return vec;
}

Gradients Network::backprop(const Tape& tape, std::span<const double> output_grad, Matrix* input_grad) const {
    if (tape.owner != this || tape.generation != generation_ || tape.layers.size() != layers_.size()) {
        throw PreconditionError("stale tape: it was not produced by this network's current parameters");
    }
    if (output_grad.size() != output_width_) {
        throw DimensionError("output gradient has length " + std::to_string(output_grad.size()) + ", expected " +
                             std::to_string(output_width_));
    }

    Gradients grads = zero_gradients();
    std::vector<std::size_t> offsets(layers_.size(), 0);
    {
        std::size_t block = 0;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            offsets[i] = block;
            if (std::holds_alternative<DenseLayer>(layers_[i])) block += 2;
            if (std::holds_alternative<GruLayer>(layers_[i])) block += 9;
        }
    }

    Vector g(output_grad.begin(), output_grad.end());
    Matrix gseq;
    bool have_sequence_grad = false;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const Tape::LayerRecord& rec = tape.layers[li];
        std::visit(Overloaded{
                       [&](const FlattenLayer&) {
                           if (!have_sequence_grad) {
                               gseq = Matrix(tape.layers.empty() ? 0 : g.size() / input_width_, input_width_, g);
                               have_sequence_grad = true;
                           }
                       },
                       [&](const GruLayer& layer) {
                           const auto& p = layer.params;
                           GruGrads gg = GruGrads::zeros_like(p);
                           gseq = Matrix(rec.input.rows(), rec.input.cols());
                           Vector dh = g;
                           for (std::size_t t = rec.steps.size(); t-- > 0;) {
                               dh = gru_step_backward(p, rec.steps[t], dh, gg, gseq.row(t));
                           }
                           const std::size_t o = offsets[li];
                           grads[o + 0] = std::move(gg.w_z);
                           grads[o + 1] = std::move(gg.u_z);
                           grads[o + 2] = std::move(gg.b_z);
                           grads[o + 3] = std::move(gg.w_r);
                           grads[o + 4] = std::move(gg.u_r);
                           grads[o + 5] = std::move(gg.b_r);
                           grads[o + 6] = std::move(gg.w_h);
                           grads[o + 7] = std::move(gg.u_h);
                           grads[o + 8] = std::move(gg.b_h);
                           have_sequence_grad = true;
                       },
                       [&](const DenseLayer& layer) {
                           Vector gpre = activate_backward(layer.activation, rec.pre, rec.output, g);
                           const std::size_t o = offsets[li];
                           g = dense_backward(layer.params, rec.input.row(0), gpre, grads[o], grads[o + 1]);
                       },
                   },
                   layers_[li]);
    }

    if (input_grad != nullptr) {
        if (have_sequence_grad) {
            *input_grad = std::move(gseq);
        } else {
            const std::size_t rows = g.size() / input_width_;
            *input_grad = Matrix(rows, input_width_, std::move(g));
        }
    }
    return grads;
}

template <class Self, class Out>
void Network::collect_blocks(Self& self, Out& out) {
    for (auto& layer : self.layers_) {
        if (auto* d = std::get_if<DenseLayer>(&layer)) {
            out.emplace_back(d->params.weights.values());
            out.emplace_back(d->params.bias);
        } else if (auto* g = std::get_if<GruLayer>(&layer)) {
            auto& p = g->params;
            out.emplace_back(p.w_z.values());
            out.emplace_back(p.u_z.values());
            out.emplace_back(p.b_z);
            out.emplace_back(p.w_r.values());
            out.emplace_back(p.u_r.values());
            out.emplace_back(p.b_r);
            out.emplace_back(p.w_h.values());
            out.emplace_back(p.u_h.values());
            out.emplace_back(p.b_h);
        }
    }
}

std::vector<std::span<double>> Network::parameters() {
    ++generation_;
    std::vector<std::span<double>> out;
    collect_blocks(*this, out);
    return out;
}

std::vector<std::span<const double>> Network::parameters() const {
    std::vector<std::span<const double>> out;
    collect_blocks(*this, out);
    return out;
}

Gradients Network::zero_gradients() const {
    Gradients g;
    for (auto block : parameters()) g.emplace_back(block.size(), 0.0);
    return g;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (auto block : parameters()) n += block.size();
    return n;
}

Network make_network(std::size_t input_width, const std::vector<LayerSpec>& specs, Rng& rng,
                     std::size_t input_steps) {
    std::vector<Layer> layers;
    std::size_t width = input_width;
    std::size_t steps = input_steps;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const LayerSpec& s = specs[i];
        switch (s.kind) {
            case LayerSpec::Kind::flatten:
                layers.emplace_back(FlattenLayer{});
                if (i + 1 >= specs.size() || specs[i + 1].kind != LayerSpec::Kind::gru) {
                    width *= steps;
                    steps = 1;
                }
                break;
            case LayerSpec::Kind::dense: {
                DenseLayer d;
                d.activation = s.activation;
                d.params.weights = Matrix(s.units, width);
                d.params.bias = Vector(s.units, 0.0);
                fill_uniform(d.params.weights.values(), std::sqrt(6.0 / static_cast<double>(width + s.units)), rng);
                layers.emplace_back(std::move(d));
                width = s.units;
                break;
            }
            case LayerSpec::Kind::gru: {
                GruLayer g{GruParams::zeros(width, s.units)};
                const double limit = 1.0 / std::sqrt(static_cast<double>(s.units));
                for (Matrix* m : {&g.params.w_z, &g.params.u_z, &g.params.w_r, &g.params.u_r, &g.params.w_h,
                                  &g.params.u_h}) {
                    fill_uniform(m->values(), limit, rng);
                }
                layers.emplace_back(std::move(g));
                width = s.units;
                steps = 1;
                break;
            }
        }
    }
    return Network(input_width, std::move(layers), input_steps);
}

void soft_update(Network& target, const Network& online, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw PreconditionError("soft update rate must lie in [0, 1], got " + std::to_string(tau));
    }
    auto src = online.parameters();
    auto dst = target.parameters();
    if (src.size() != dst.size()) throw DimensionError("soft update between networks of different structure");
    for (std::size_t b = 0; b < src.size(); ++b) {
        if (src[b].size() != dst[b].size()) {
            throw DimensionError("soft update block " + std::to_string(b) + " has length " +
                                 std::to_string(dst[b].size()) + " vs " + std::to_string(src[b].size()));
        }
        for (std::size_t i = 0; i < src[b].size(); ++i) dst[b][i] = (1.0 - tau) * dst[b][i] + tau * src[b][i];
    }
}

}  // namespace adaptswarm::nn
