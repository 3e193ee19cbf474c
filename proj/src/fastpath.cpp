#include "sgs/fastpath.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <thread>

#include "sgs/kernels.hpp"

namespace sgs {

namespace {

std::atomic<bool> g_inject_fault{false};

void check_chain_shapes(const ChainTree& tree, const std::vector<double>& w,
                        const Matrix& values) {
    if (tree.length == 0 || tree.root >= tree.length) {
        throw std::domain_error("chain tree: root out of range");
    }
    if (values.rows != tree.length || w.size() + 1 != tree.length) {
        throw std::invalid_argument("chain filter: length mismatch");
    }
}

// Gather/scatter between tensor rows/columns and node-major chain matrices.
void load_row(const Tensor3& t, int y, Matrix& m) {
    for (int x = 0; x < t.W; ++x)
        for (int c = 0; c < t.C; ++c) m.at(x, c) = t.at(c, y, x);
}

void store_row(Tensor3& t, int y, const Matrix& m) {
    for (int x = 0; x < t.W; ++x)
        for (int c = 0; c < t.C; ++c) t.at(c, y, x) = m.at(x, c);
}

// Columns are gathered in groups so each tensor sweep reads whole cache
// lines; a lone column walks memory with stride W and goes DRAM-bound.
constexpr int kColGroup = 8;

void load_col_group(const Tensor3& t, int x0, int nx, std::vector<Matrix>& ms) {
    for (int c = 0; c < t.C; ++c)
        for (int y = 0; y < t.H; ++y)
            for (int xi = 0; xi < nx; ++xi) ms[xi].at(y, c) = t.at(c, y, x0 + xi);
}

void add_col_group(Tensor3& t, int x0, int nx, const std::vector<Matrix>& ms) {
    for (int c = 0; c < t.C; ++c)
        for (int y = 0; y < t.H; ++y)
            for (int xi = 0; xi < nx; ++xi) t.at(c, y, x0 + xi) += ms[xi].at(y, c);
}

void parallel_for(std::size_t n, bool parallel,
                  const std::function<void(std::size_t)>& fn);

} // namespace

void set_fault_injection(bool enabled) { g_inject_fault.store(enabled); }
bool fault_injection_enabled() { return g_inject_fault.load(); }

ChainTree build_chain(std::size_t length, std::size_t root) {
    if (length == 0 || root >= length) {
        throw std::domain_error("build_chain: root out of range");
    }
    return ChainTree{length, root};
}

std::vector<double> chain_edge_distances(const Matrix& guide) {
    const auto& k = kernels::active();
    std::vector<double> d;
    if (guide.rows == 0) throw std::invalid_argument("empty chain");
    d.reserve(guide.rows - 1);
    for (std::size_t i = 0; i + 1 < guide.rows; ++i) {
        d.push_back(std::sqrt(k.squared_distance(guide.row(i), guide.row(i + 1),
                                                 guide.cols)));
    }
    return d;
}

std::vector<double> chain_edge_weights(const std::vector<double>& distances,
                                       double scale) {
    if (!(scale > 0.0)) throw std::domain_error("chain_edge_weights: scale must be > 0");
    std::vector<double> w(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i)
        w[i] = std::exp(-distances[i] / scale);
    return w;
}

Matrix aggregate_pass(const ChainTree& tree, const std::vector<double>& w,
                      const Matrix& values, EvalCounter* counter) {
    check_chain_shapes(tree, w, values);
    const auto& k = kernels::active();
    const std::size_t L = tree.length, r = tree.root, C = values.cols;
    Matrix A(L, C);
    // left segment, leaf 0 towards the root
    if (r > 0) {
        std::memcpy(A.row(0), values.row(0), C * sizeof(double));
        for (std::size_t i = 1; i < r; ++i)
            k.weighted_add(A.row(i), values.row(i), A.row(i - 1), w[i - 1], C);
    }
    // right segment, leaf L-1 towards the root
    if (r + 1 < L) {
        std::memcpy(A.row(L - 1), values.row(L - 1), C * sizeof(double));
        for (std::size_t i = L - 1; i-- > r + 1;)
            k.weighted_add(A.row(i), values.row(i), A.row(i + 1), w[i], C);
    }
    // root collects up to two children
    std::memcpy(A.row(r), values.row(r), C * sizeof(double));
    if (r > 0) k.axpy(A.row(r), A.row(r - 1), w[r - 1], C);
    if (r + 1 < L) k.axpy(A.row(r), A.row(r + 1), w[r], C);
    if (counter) counter->bump(L - 1);
    return A;
}

Matrix update_pass(const ChainTree& tree, const std::vector<double>& w,
                   const Matrix& A, EvalCounter* counter) {
    check_chain_shapes(tree, w, A);
    const auto& k = kernels::active();
    const std::size_t L = tree.length, r = tree.root, C = A.cols;
    Matrix U(L, C);
    std::memcpy(U.row(r), A.row(r), C * sizeof(double));
    for (std::size_t i = r; i-- > 0;)
        k.lincomb(U.row(i), U.row(i + 1), w[i], A.row(i), 1.0 - w[i] * w[i], C);
    for (std::size_t i = r + 1; i < L; ++i)
        k.lincomb(U.row(i), U.row(i - 1), w[i - 1], A.row(i), 1.0 - w[i - 1] * w[i - 1], C);
    if (counter) counter->bump(L - 1);
    return U;
}

Matrix chain_filter_fast(const Matrix& guide, const Matrix& values,
                         double scale, std::size_t root, EvalCounter* counter) {
    if (guide.rows != values.rows) {
        throw std::invalid_argument("chain_filter_fast: length mismatch");
    }
    ChainTree tree = build_chain(values.rows, root);
    std::vector<double> w = chain_edge_weights(chain_edge_distances(guide), scale);
    Matrix A = aggregate_pass(tree, w, values, counter);
    return update_pass(tree, w, A, counter);
}

namespace {

void parallel_for(std::size_t n, bool parallel,
                  const std::function<void(std::size_t)>& fn) {
    if (!parallel || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(hw > 0 ? hw : 2, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

Tensor3 semi_global_filter(const Tensor3& guide, const Tensor3& values,
                           Scale scale, EvalCounter* counter,
                           const FilterOptions& opts) {
    if (guide.H != values.H || guide.W != values.W) {
        throw std::invalid_argument("semi_global_filter: guide/values spatial mismatch");
    }
    const int H = values.H, W = values.W, C = values.C;
    const bool fault = g_inject_fault.load();

    // Every chain owns disjoint output positions within its pass, and the
    // column pass only starts after the row pass has joined, so scheduling
    // order cannot affect the result.
    Tensor3 out(C, H, W);

    parallel_for(static_cast<std::size_t>(H), opts.parallel, [&](std::size_t yi) {
        int y = static_cast<int>(yi);
        Matrix g(W, guide.C), v(W, C);
        load_row(guide, y, g);
        load_row(values, y, v);
        ChainTree tree = build_chain(W, default_root(W));
        std::vector<double> w = chain_edge_weights(chain_edge_distances(g), scale.alpha);
        if (fault && y == 0 && !w.empty()) w[0] *= 0.5;
        Matrix A = aggregate_pass(tree, w, v, counter);
        Matrix U = update_pass(tree, w, A, counter);
        store_row(out, y, U);
    });

    std::size_t groups = (static_cast<std::size_t>(W) + kColGroup - 1) / kColGroup;
    parallel_for(groups, opts.parallel, [&](std::size_t gi) {
        int x0 = static_cast<int>(gi) * kColGroup;
        int nx = std::min(kColGroup, W - x0);
        std::vector<Matrix> g(nx, Matrix(H, guide.C));
        std::vector<Matrix> v(nx, Matrix(H, C));
        std::vector<Matrix> u;
        u.reserve(nx);
        load_col_group(guide, x0, nx, g);
        load_col_group(values, x0, nx, v);
        ChainTree tree = build_chain(H, default_root(H));
        for (int xi = 0; xi < nx; ++xi) {
            std::vector<double> w =
                chain_edge_weights(chain_edge_distances(g[xi]), scale.beta);
            Matrix A = aggregate_pass(tree, w, v[xi], counter);
            u.push_back(update_pass(tree, w, A, counter));
        }
        add_col_group(out, x0, nx, u);
    });

    return out;
}

Tensor3 normalizer(const Tensor3& guide, Scale scale, const FilterOptions& opts) {
    Tensor3 ones = make_tensor(1, guide.H, guide.W, 1.0);
    return semi_global_filter(guide, ones, scale, nullptr, opts);
}

} // namespace sgs
