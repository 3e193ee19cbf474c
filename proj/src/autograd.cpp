#include "sgs/autograd.hpp"

#include <cmath>
#include <stdexcept>

#include "sgs/kernels.hpp"

namespace sgs {

namespace {

constexpr double kZeroDistance = 1e-12;

void load_row(const Tensor3& t, int y, Matrix& m) {
    for (int x = 0; x < t.W; ++x)
        for (int c = 0; c < t.C; ++c) m.at(x, c) = t.at(c, y, x);
}

void load_col(const Tensor3& t, int x, Matrix& m) {
    for (int y = 0; y < t.H; ++y)
        for (int c = 0; c < t.C; ++c) m.at(y, c) = t.at(c, y, x);
}

void accumulate_row(Tensor3& t, int y, const Matrix& m) {
    for (int x = 0; x < t.W; ++x)
        for (int c = 0; c < t.C; ++c) t.at(c, y, x) += m.at(x, c);
}

void accumulate_col(Tensor3& t, int x, const Matrix& m) {
    for (int y = 0; y < t.H; ++y)
        for (int c = 0; c < t.C; ++c) t.at(c, y, x) += m.at(y, c);
}

// d_x += M^T d_out; d_M += d_out x^T (summed over positions).
void pointwise_backward(const Tensor3& x, const Matrix& M, const Tensor3& d_out,
                        Tensor3& d_x, Matrix& d_M) {
    const auto& k = kernels::active();
    const std::size_t plane = static_cast<std::size_t>(x.H) * x.W;
    for (std::size_t r = 0; r < M.rows; ++r) {
        const double* g = d_out.values.data() + r * plane;
        for (std::size_t c = 0; c < M.cols; ++c) {
            k.axpy(d_x.values.data() + c * plane, g, M.at(r, c), plane);
            d_M.at(r, c) += k.dot(g, x.values.data() + c * plane, plane);
        }
    }
}

} // namespace

ChainRecord chain_forward_record(const Matrix& guide, const Matrix& values,
                                 double scale, std::size_t root,
                                 EvalCounter* counter) {
    if (guide.rows != values.rows) {
        throw std::invalid_argument("chain_forward_record: length mismatch");
    }
    ChainRecord rec;
    rec.tree = build_chain(values.rows, root);
    rec.scale = scale;
    rec.distances = chain_edge_distances(guide);
    rec.weights = chain_edge_weights(rec.distances, scale);
    rec.aggregated = aggregate_pass(rec.tree, rec.weights, values, counter);
    rec.updated = update_pass(rec.tree, rec.weights, rec.aggregated, counter);
    return rec;
}

ChainGrads backward_chain_filter(const Matrix& guide, const Matrix& values,
                                 const ChainRecord& rec, const Matrix& upstream) {
    const std::size_t L = rec.tree.length;
    const std::size_t r = rec.tree.root;
    const std::size_t C = values.cols;
    if (upstream.rows != L || upstream.cols != C || values.rows != L ||
        guide.rows != L || rec.aggregated.rows != L) {
        throw std::invalid_argument("backward_chain_filter: shape mismatch");
    }
    const auto& k = kernels::active();
    const Matrix& A = rec.aggregated;
    const Matrix& U = rec.updated;
    const std::vector<double>& w = rec.weights;

    ChainGrads g;
    g.d_guide = Matrix(L, guide.cols);
    g.d_values = Matrix(L, C);
    std::vector<double> d_w(L > 0 ? L - 1 : 0, 0.0);
    Matrix gU = upstream; // accumulates as we walk towards the root
    Matrix gA(L, C);

    // Update pass reverse. Forward ran from the root outward, so the reverse
    // walks each segment from its leaf back to the root.
    for (std::size_t i = 0; i < r; ++i) {
        double wi = w[i];
        k.axpy(gA.row(i), gU.row(i), 1.0 - wi * wi, C);
        k.axpy(gU.row(i + 1), gU.row(i), wi, C);
        d_w[i] += k.dot(gU.row(i), U.row(i + 1), C) - 2.0 * wi * k.dot(gU.row(i), A.row(i), C);
    }
    for (std::size_t i = L - 1; i > r; --i) {
        double wi = w[i - 1];
        k.axpy(gA.row(i), gU.row(i), 1.0 - wi * wi, C);
        k.axpy(gU.row(i - 1), gU.row(i), wi, C);
        d_w[i - 1] += k.dot(gU.row(i), U.row(i - 1), C) - 2.0 * wi * k.dot(gU.row(i), A.row(i), C);
    }
    k.add(gA.row(r), gU.row(r), C);

    // Aggregate pass reverse: root first, then outward towards the leaves.
    k.add(g.d_values.row(r), gA.row(r), C);
    if (r > 0) {
        d_w[r - 1] += k.dot(gA.row(r), A.row(r - 1), C);
        k.axpy(gA.row(r - 1), gA.row(r), w[r - 1], C);
    }
    if (r + 1 < L) {
        d_w[r] += k.dot(gA.row(r), A.row(r + 1), C);
        k.axpy(gA.row(r + 1), gA.row(r), w[r], C);
    }
    for (std::size_t i = r; i-- > 1;) {
        k.add(g.d_values.row(i), gA.row(i), C);
        d_w[i - 1] += k.dot(gA.row(i), A.row(i - 1), C);
        k.axpy(gA.row(i - 1), gA.row(i), w[i - 1], C);
    }
    if (r > 0) k.add(g.d_values.row(0), gA.row(0), C);
    for (std::size_t i = r + 1; i + 1 < L; ++i) {
        k.add(g.d_values.row(i), gA.row(i), C);
        d_w[i] += k.dot(gA.row(i), A.row(i + 1), C);
        k.axpy(gA.row(i + 1), gA.row(i), w[i], C);
    }
    if (r + 1 < L) k.add(g.d_values.row(L - 1), gA.row(L - 1), C);

    // Through the weights w = exp(-d/s) into guide distances and the scale.
    for (std::size_t e = 0; e + 1 < L; ++e) {
        double we = w[e];
        double de = rec.distances[e];
        double gw = d_w[e];
        g.d_scale += gw * we * de / (rec.scale * rec.scale);
        double gd = -gw * we / rec.scale;
        if (de > kZeroDistance) {
            // subgradient 0 at d == 0
            double coef = gd / de;
            for (std::size_t c = 0; c < guide.cols; ++c) {
                double diff = coef * (guide.at(e, c) - guide.at(e + 1, c));
                g.d_guide.at(e, c) += diff;
                g.d_guide.at(e + 1, c) -= diff;
            }
        }
    }
    return g;
}

Tensor3 BlockTape::forward(const Tensor3& input, const BlockParams& params,
                           EvalCounter* counter) {
    input_ = input;
    params_ = params;
    guide_ = pointwise_transform(input, params.lambda_matrix);
    Tensor3 values = pointwise_transform(input, params.psi_matrix);
    const int H = input.H, W = input.W, C = input.C;

    aggregated_ = Tensor3(C, H, W);
    row_records_.clear();
    col_records_.clear();
    row_ones_records_.clear();
    col_ones_records_.clear();

    Matrix g_row(W, guide_.C), v_row(W, C);
    for (int y = 0; y < H; ++y) {
        load_row(guide_, y, g_row);
        load_row(values, y, v_row);
        row_records_.push_back(chain_forward_record(g_row, v_row, params.scale.alpha,
                                                    default_root(W), counter));
        accumulate_row(aggregated_, y, row_records_.back().updated);
    }
    Matrix g_col(H, guide_.C), v_col(H, C);
    for (int x = 0; x < W; ++x) {
        load_col(guide_, x, g_col);
        load_col(values, x, v_col);
        col_records_.push_back(chain_forward_record(g_col, v_col, params.scale.beta,
                                                    default_root(H), counter));
        accumulate_col(aggregated_, x, col_records_.back().updated);
    }

    Tensor3 out = aggregated_;
    if (params.normalized) {
        norm_ = Tensor3(1, H, W);
        Matrix ones_row(W, 1, 1.0), ones_col(H, 1, 1.0);
        for (int y = 0; y < H; ++y) {
            load_row(guide_, y, g_row);
            row_ones_records_.push_back(chain_forward_record(
                g_row, ones_row, params.scale.alpha, default_root(W)));
            accumulate_row(norm_, y, row_ones_records_.back().updated);
        }
        for (int x = 0; x < W; ++x) {
            load_col(guide_, x, g_col);
            col_ones_records_.push_back(chain_forward_record(
                g_col, ones_col, params.scale.beta, default_root(H)));
            accumulate_col(norm_, x, col_ones_records_.back().updated);
        }
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) out.at(c, y, x) /= norm_.at(0, y, x);
    }
    kernels::active().add(out.values.data(), input.values.data(), out.size());
    recorded_ = true;
    return out;
}

GradBundle BlockTape::backward(const Tensor3& upstream) const {
    if (!recorded_) throw std::logic_error("BlockTape::backward before forward");
    if (upstream.C != input_.C || upstream.H != input_.H || upstream.W != input_.W) {
        throw std::invalid_argument("backward: upstream shape mismatch");
    }
    const int H = input_.H, W = input_.W, C = input_.C;
    const int Cr = static_cast<int>(params_.lambda_matrix.rows);

    GradBundle out;
    out.d_input = upstream; // residual path
    out.d_lambda = Matrix(params_.lambda_matrix.rows, params_.lambda_matrix.cols);
    out.d_psi = Matrix(params_.psi_matrix.rows, params_.psi_matrix.cols);

    // Gradient reaching the aggregation branch G, and (normalized mode) S.
    Tensor3 d_agg = upstream;
    Tensor3 d_norm;
    if (params_.normalized) {
        d_norm = Tensor3(1, H, W);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double s = norm_.at(0, y, x);
                double acc = 0.0;
                for (int c = 0; c < C; ++c) {
                    acc += upstream.at(c, y, x) * aggregated_.at(c, y, x);
                    d_agg.at(c, y, x) = upstream.at(c, y, x) / s;
                }
                d_norm.at(0, y, x) = -acc / (s * s);
            }
        }
    }

    Tensor3 values = pointwise_transform(input_, params_.psi_matrix);
    Tensor3 d_guide_t(Cr, H, W);
    Tensor3 d_values_t(C, H, W);

    Matrix g_row(W, Cr), v_row(W, C), up_row(W, C);
    for (int y = 0; y < H; ++y) {
        load_row(guide_, y, g_row);
        load_row(values, y, v_row);
        load_row(d_agg, y, up_row);
        ChainGrads cg = backward_chain_filter(g_row, v_row, row_records_[y], up_row);
        accumulate_row(d_guide_t, y, cg.d_guide);
        accumulate_row(d_values_t, y, cg.d_values);
        out.d_alpha += cg.d_scale;
    }
    Matrix g_col(H, Cr), v_col(H, C), up_col(H, C);
    for (int x = 0; x < W; ++x) {
        load_col(guide_, x, g_col);
        load_col(values, x, v_col);
        load_col(d_agg, x, up_col);
        ChainGrads cg = backward_chain_filter(g_col, v_col, col_records_[x], up_col);
        accumulate_col(d_guide_t, x, cg.d_guide);
        accumulate_col(d_values_t, x, cg.d_values);
        out.d_beta += cg.d_scale;
    }

    if (params_.normalized) {
        Matrix ones_row(W, 1, 1.0), ones_col(H, 1, 1.0);
        Matrix upn_row(W, 1), upn_col(H, 1);
        for (int y = 0; y < H; ++y) {
            load_row(guide_, y, g_row);
            load_row(d_norm, y, upn_row);
            ChainGrads cg = backward_chain_filter(g_row, ones_row,
                                                  row_ones_records_[y], upn_row);
            accumulate_row(d_guide_t, y, cg.d_guide);
            out.d_alpha += cg.d_scale;
        }
        for (int x = 0; x < W; ++x) {
            load_col(guide_, x, g_col);
            load_col(d_norm, x, upn_col);
            ChainGrads cg = backward_chain_filter(g_col, ones_col,
                                                  col_ones_records_[x], upn_col);
            accumulate_col(d_guide_t, x, cg.d_guide);
            out.d_beta += cg.d_scale;
        }
    }

    pointwise_backward(input_, params_.lambda_matrix, d_guide_t, out.d_input,
                       out.d_lambda);
    pointwise_backward(input_, params_.psi_matrix, d_values_t, out.d_input,
                       out.d_psi);
    return out;
}

namespace {

double rel_err(double a, double b) {
    double den = std::max({std::abs(a), std::abs(b), 1e-8});
    return std::abs(a - b) / den;
}

} // namespace

double finite_diff_check_block(const Tensor3& input, const BlockParams& params,
                               FdComponent component, double h,
                               std::uint64_t probe_seed) {
    if (!(h > 0.0)) throw std::domain_error("finite_diff_check: h must be > 0");
    Tensor3 probe = random_tensor(input.C, input.H, input.W, probe_seed);

    auto loss = [&](const Tensor3& in, const BlockParams& p) {
        Tensor3 out = semi_global_block(in, p);
        return kernels::active().dot(out.values.data(), probe.values.data(),
                                     out.size());
    };

    BlockTape tape;
    tape.forward(input, params);
    GradBundle g = tape.backward(probe);

    double max_err = 0.0;
    auto check_scalar = [&](double analytic, auto&& nudge) {
        BlockParams p_plus = params, p_minus = params;
        nudge(p_plus, h);
        nudge(p_minus, -h);
        double numeric = (loss(input, p_plus) - loss(input, p_minus)) / (2.0 * h);
        max_err = std::max(max_err, rel_err(analytic, numeric));
    };

    if (component == FdComponent::Input || component == FdComponent::All) {
        for (std::size_t i = 0; i < input.size(); ++i) {
            Tensor3 plus = input, minus = input;
            plus.values[i] += h;
            minus.values[i] -= h;
            double numeric = (loss(plus, params) - loss(minus, params)) / (2.0 * h);
            max_err = std::max(max_err, rel_err(g.d_input.values[i], numeric));
        }
    }
    if (component == FdComponent::Alpha || component == FdComponent::All) {
        check_scalar(g.d_alpha, [](BlockParams& p, double d) { p.scale.alpha += d; });
    }
    if (component == FdComponent::Beta || component == FdComponent::All) {
        check_scalar(g.d_beta, [](BlockParams& p, double d) { p.scale.beta += d; });
    }
    if (component == FdComponent::Lambda || component == FdComponent::All) {
        for (std::size_t i = 0; i < params.lambda_matrix.v.size(); ++i) {
            check_scalar(g.d_lambda.v[i],
                         [i](BlockParams& p, double d) { p.lambda_matrix.v[i] += d; });
        }
    }
    if (component == FdComponent::Psi || component == FdComponent::All) {
        for (std::size_t i = 0; i < params.psi_matrix.v.size(); ++i) {
            check_scalar(g.d_psi.v[i],
                         [i](BlockParams& p, double d) { p.psi_matrix.v[i] += d; });
        }
    }
    return max_err;
}

double finite_diff_check_transform(const Tensor3& input, const Matrix& M,
                                   double h, std::uint64_t probe_seed) {
    if (!(h > 0.0)) throw std::domain_error("finite_diff_check: h must be > 0");
    Tensor3 probe = random_tensor(static_cast<int>(M.rows), input.H, input.W,
                                  probe_seed);
    const auto& k = kernels::active();
    auto loss = [&](const Tensor3& in) {
        Tensor3 out = pointwise_transform(in, M);
        return k.dot(out.values.data(), probe.values.data(), out.size());
    };
    // analytic: d_input = M^T probe
    Tensor3 d_input(input.C, input.H, input.W);
    Matrix d_M(M.rows, M.cols);
    pointwise_backward(input, M, probe, d_input, d_M);

    double max_err = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        Tensor3 plus = input, minus = input;
        plus.values[i] += h;
        minus.values[i] -= h;
        double numeric = (loss(plus) - loss(minus)) / (2.0 * h);
        max_err = std::max(max_err, rel_err(d_input.values[i], numeric));
    }
    return max_err;
}

} // namespace sgs
