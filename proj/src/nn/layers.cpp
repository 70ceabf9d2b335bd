#include "adaptswarm/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::nn {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::linear: return "linear";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::softmax: return "softmax";
    }
    return "unknown";
}

std::optional<Activation> parse_activation(std::string_view name) {
    for (Activation a : {Activation::relu, Activation::linear, Activation::tanh, Activation::sigmoid,
                         Activation::softmax}) {
        if (to_string(a) == name) return a;
    }
    return std::nullopt;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Vector activate(Activation kind, std::span<const double> x) {
    Vector y(x.begin(), x.end());
    switch (kind) {
        case Activation::relu:
            for (double& v : y) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::linear:
            break;
        case Activation::tanh:
            for (double& v : y) v = std::tanh(v);
            break;
        case Activation::sigmoid:
            for (double& v : y) v = sigmoid(v);
            break;
        case Activation::softmax: {
            if (y.empty()) throw PreconditionError("softmax of an empty vector");
            const double peak = *std::max_element(y.begin(), y.end());
            double total = 0.0;
            for (double& v : y) {
                v = std::exp(v - peak);
                total += v;
            }
            for (double& v : y) v /= total;
            break;
        }
    }
    return y;
}

Vector activate_backward(Activation kind, std::span<const double> pre, std::span<const double> out,
                         std::span<const double> grad_out) {
    const std::size_t n = grad_out.size();
    if (pre.size() != n || out.size() != n) {
        throw DimensionError("activation backward: pre " + std::to_string(pre.size()) + ", out " +
                             std::to_string(out.size()) + ", grad " + std::to_string(n));
    }
    Vector g(n);
    switch (kind) {
        case Activation::relu:
            for (std::size_t i = 0; i < n; ++i) g[i] = pre[i] > 0.0 ? grad_out[i] : 0.0;
            break;
        case Activation::linear:
            std::copy(grad_out.begin(), grad_out.end(), g.begin());
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < n; ++i) g[i] = grad_out[i] * (1.0 - out[i] * out[i]);
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) g[i] = grad_out[i] * out[i] * (1.0 - out[i]);
            break;
        case Activation::softmax: {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += out[i] * grad_out[i];
            for (std::size_t i = 0; i < n; ++i) g[i] = out[i] * (grad_out[i] - dot);
            break;
        }
    }
    return g;
}

Vector dense_forward(const DenseParams& p, std::span<const double> x) {
    if (x.size() != p.weights.cols()) {
        throw DimensionError("dense layer with weights " + p.weights.shape_string() +
                             " received input of length " + std::to_string(x.size()));
    }
    if (p.bias.size() != p.weights.rows()) {
        throw DimensionError("dense bias length " + std::to_string(p.bias.size()) +
                             " does not match weights " + p.weights.shape_string());
    }
    Vector y = matvec(p.weights, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += p.bias[i];
    return y;
}

Vector dense_backward(const DenseParams& p, std::span<const double> x, std::span<const double> grad_pre,
                      std::span<double> grad_weights, std::span<double> grad_bias) {
    outer_accumulate(grad_weights, grad_pre, x);
    for (std::size_t i = 0; i < grad_pre.size(); ++i) grad_bias[i] += grad_pre[i];
    Vector gx(x.size(), 0.0);
    matvec_transposed_accumulate(p.weights, grad_pre, gx);
    return gx;
}

GruParams GruParams::zeros(std::size_t inputs, std::size_t hidden) {
    GruParams p;
    p.w_z = Matrix(hidden, inputs);
    p.w_r = Matrix(hidden, inputs);
    p.w_h = Matrix(hidden, inputs);
    p.u_z = Matrix(hidden, hidden);
    p.u_r = Matrix(hidden, hidden);
    p.u_h = Matrix(hidden, hidden);
    p.b_z = Vector(hidden, 0.0);
    p.b_r = Vector(hidden, 0.0);
    p.b_h = Vector(hidden, 0.0);
    return p;
}

void GruParams::validate() const {
    const std::size_t h = hidden();
    const std::size_t in = inputs();
    auto check_input = [&](const Matrix& m, const char* name) {
        if (m.rows() != h || m.cols() != in) {
            throw DimensionError(std::string("GRU ") + name + " has shape " + m.shape_string() +
                                 ", expected (" + std::to_string(h) + "x" + std::to_string(in) + ")");
        }
    };
    auto check_hidden = [&](const Matrix& m, const char* name) {
        if (m.rows() != h || m.cols() != h) {
            throw DimensionError(std::string("GRU ") + name + " has shape " + m.shape_string() +
                                 ", expected (" + std::to_string(h) + "x" + std::to_string(h) + ")");
        }
    };
    auto check_bias = [&](const Vector& b, const char* name) {
        if (b.size() != h) {
            throw DimensionError(std::string("GRU ") + name + " has length " + std::to_string(b.size()) +
                                 ", expected " + std::to_string(h));
        }
    };
    check_input(w_z, "W_z");
    check_input(w_r, "W_r");
    check_input(w_h, "W_h");
    check_hidden(u_z, "U_z");
    check_hidden(u_r, "U_r");
    check_hidden(u_h, "U_h");
    check_bias(b_z, "b_z");
    check_bias(b_r, "b_r");
    check_bias(b_h, "b_h");
}

Vector gru_step(const GruParams& p, std::span<const double> x, std::span<const double> h_prev,
                GruStepCache* cache) {
    const std::size_t h = p.hidden();
    if (h_prev.size() != h) {
        throw DimensionError("GRU hidden state has length " + std::to_string(h_prev.size()) + ", expected " +
                             std::to_string(h));
    }
    if (x.size() != p.inputs()) {
        throw DimensionError("GRU input has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(p.inputs()));
    }

    Vector z = matvec(p.w_z, x);
    Vector uz = matvec(p.u_z, h_prev);
    Vector r = matvec(p.w_r, x);
    Vector ur = matvec(p.u_r, h_prev);
    for (std::size_t i = 0; i < h; ++i) {
        z[i] = sigmoid(z[i] + uz[i] + p.b_z[i]);
        r[i] = sigmoid(r[i] + ur[i] + p.b_r[i]);
    }
    Vector rh(h);
    for (std::size_t i = 0; i < h; ++i) rh[i] = r[i] * h_prev[i];
    Vector cand = matvec(p.w_h, x);
    Vector uh = matvec(p.u_h, rh);
    for (std::size_t i = 0; i < h; ++i) cand[i] = std::tanh(cand[i] + uh[i] + p.b_h[i]);

    Vector out(h);
    for (std::size_t i = 0; i < h; ++i) out[i] = (1.0 - z[i]) * h_prev[i] + z[i] * cand[i];

    if (cache != nullptr) {
        cache->x.assign(x.begin(), x.end());
        cache->h_prev.assign(h_prev.begin(), h_prev.end());
        cache->z = std::move(z);
        cache->r = std::move(r);
        cache->candidate = std::move(cand);
        cache->reset_hidden = std::move(rh);
        cache->h = out;
    }
    return out;
}

Vector gru_sequence_forward(const GruParams& p, const Matrix& sequence, std::span<const double> h0,
                            std::vector<GruStepCache>* caches) {
    if (sequence.rows() == 0) throw PreconditionError("GRU sequence must contain at least one step");
    Vector h(h0.begin(), h0.end());
    if (caches != nullptr) caches->assign(sequence.rows(), GruStepCache{});
    for (std::size_t t = 0; t < sequence.rows(); ++t) {
        h = gru_step(p, sequence.row(t), h, caches != nullptr ? &(*caches)[t] : nullptr);
    }
    return h;
}

GruGrads GruGrads::zeros_like(const GruParams& p) {
    GruGrads g;
    g.w_z.assign(p.w_z.size(), 0.0);
    g.u_z.assign(p.u_z.size(), 0.0);
    g.b_z.assign(p.b_z.size(), 0.0);
    g.w_r.assign(p.w_r.size(), 0.0);
    g.u_r.assign(p.u_r.size(), 0.0);
    g.b_r.assign(p.b_r.size(), 0.0);
    g.w_h.assign(p.w_h.size(), 0.0);
    g.u_h.assign(p.u_h.size(), 0.0);
    g.b_h.assign(p.b_h.size(), 0.0);
    return g;
}

Vector gru_step_backward(const GruParams& p, const GruStepCache& c, std::span<const double> grad_h,
                         GruGrads& g, std::span<double> grad_x) {
    const std::size_t h = p.hidden();
    Vector d_prev(h);
    Vector d_cand_pre(h), d_z_pre(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double dh = grad_h[i];
        d_prev[i] = dh * (1.0 - c.z[i]);
        const double dz = dh * (c.candidate[i] - c.h_prev[i]);
        const double dcand = dh * c.z[i];
        d_cand_pre[i] = dcand * (1.0 - c.candidate[i] * c.candidate[i]);
        d_z_pre[i] = dz * c.z[i] * (1.0 - c.z[i]);
    }

    outer_accumulate(g.w_h, d_cand_pre, c.x);
    outer_accumulate(g.u_h, d_cand_pre, c.reset_hidden);
    for (std::size_t i = 0; i < h; ++i) g.b_h[i] += d_cand_pre[i];
    Vector d_rh(h, 0.0);
    matvec_transposed_accumulate(p.u_h, d_cand_pre, d_rh);

    Vector d_r_pre(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double dr = d_rh[i] * c.h_prev[i];
        d_prev[i] += d_rh[i] * c.r[i];
        d_r_pre[i] = dr * c.r[i] * (1.0 - c.r[i]);
    }

    outer_accumulate(g.w_z, d_z_pre, c.x);
    outer_accumulate(g.u_z, d_z_pre, c.h_prev);
    outer_accumulate(g.w_r, d_r_pre, c.x);
    outer_accumulate(g.u_r, d_r_pre, c.h_prev);
    for (std::size_t i = 0; i < h; ++i) {
        g.b_z[i] += d_z_pre[i];
        g.b_r[i] += d_r_pre[i];
    }
    matvec_transposed_accumulate(p.u_z, d_z_pre, d_prev);
    matvec_transposed_accumulate(p.u_r, d_r_pre, d_prev);

    if (!grad_x.empty()) {
        matvec_transposed_accumulate(p.w_z, d_z_pre, grad_x);
        matvec_transposed_accumulate(p.w_r, d_r_pre, grad_x);
        matvec_transposed_accumulate(p.w_h, d_cand_pre, grad_x);
    }
    return d_prev;
}

}  // namespace adaptswarm::nn
