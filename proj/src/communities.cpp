#include "nestkit/communities.hpp"

#include "nestkit/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace nestkit {

namespace {

void validate_partition(const BipartiteGraph& g, const Partition& p) {
    if (p.row_community.size() != g.num_rows() || p.col_community.size() != g.num_cols())
        throw std::invalid_argument("partition does not match the graph's node counts");
    for (int c : p.row_community)
        if (c < 0) throw std::invalid_argument("negative community id");
    for (int c : p.col_community)
        if (c < 0) throw std::invalid_argument("negative community id");
}

struct Grouped {
    int k = 0;
    std::vector<std::vector<int>> rows, cols;  // global indices per community
};

Grouped group_communities(const BipartiteGraph& g, const Partition& p) {
    validate_partition(g, p);
    const Partition n = normalized(p);
    Grouped grp;
    grp.k = n.community_count();
    grp.rows.resize(static_cast<std::size_t>(grp.k));
    grp.cols.resize(static_cast<std::size_t>(grp.k));
    for (std::size_t r = 0; r < n.row_community.size(); ++r)
        grp.rows[static_cast<std::size_t>(n.row_community[r])].push_back(static_cast<int>(r));
    for (std::size_t c = 0; c < n.col_community.size(); ++c)
        grp.cols[static_cast<std::size_t>(n.col_community[c])].push_back(static_cast<int>(c));
    return grp;
}

}  // namespace

int Partition::community_count() const {
    int mx = -1;
    for (int c : row_community) mx = std::max(mx, c);
    for (int c : col_community) mx = std::max(mx, c);
    return mx + 1;
}

Partition single_community(const BipartiteGraph& g) {
    return {std::vector<int>(g.num_rows(), 0), std::vector<int>(g.num_cols(), 0)};
}

Partition singleton_communities(const BipartiteGraph& g) {
    Partition p;
    p.row_community.resize(g.num_rows());
    p.col_community.resize(g.num_cols());
    std::iota(p.row_community.begin(), p.row_community.end(), 0);
    std::iota(p.col_community.begin(), p.col_community.end(), static_cast<int>(g.num_rows()));
    return p;
}

Partition normalized(const Partition& p) {
    std::map<int, int> remap;
    Partition out;
    out.row_community.reserve(p.row_community.size());
    out.col_community.reserve(p.col_community.size());
    auto translate = [&](int c) {
        auto [it, inserted] = remap.emplace(c, static_cast<int>(remap.size()));
        (void)inserted;
        return it->second;
    };
    for (int c : p.row_community) out.row_community.push_back(translate(c));
    for (int c : p.col_community) out.col_community.push_back(translate(c));
    return out;
}

double barber_modularity(const BipartiteGraph& g, const Partition& p) {
    const Grouped grp = group_communities(g, p);
    const Partition n = normalized(p);
    if (g.num_edges() == 0) throw std::runtime_error("modularity needs at least one edge");
    const double inv_e = 1.0 / static_cast<double>(g.num_edges());

    std::vector<double> inside(static_cast<std::size_t>(grp.k), 0.0);
    for (std::size_t r = 0; r < g.num_rows(); ++r)
        for (const auto& [c, w] : g.row_neighbors(static_cast<int>(r))) {
            (void)w;
            if (n.row_community[r] == n.col_community[static_cast<std::size_t>(c)])
                inside[static_cast<std::size_t>(n.row_community[r])] += 1.0;
        }
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);
    double q = 0;
    for (int c = 0; c < grp.k; ++c) {
        double dr = 0, dc = 0;
        for (int r : grp.rows[static_cast<std::size_t>(c)]) dr += row_deg[static_cast<std::size_t>(r)];
        for (int j : grp.cols[static_cast<std::size_t>(c)]) dc += col_deg[static_cast<std::size_t>(j)];
        q += inside[static_cast<std::size_t>(c)] - dr * dc * inv_e;
    }
    return q * inv_e;
}

double in_block_nestedness(const BipartiteGraph& g, const Partition& p,
                           const MetricOptions& opt) {
    const Grouped grp = group_communities(g, p);
    const auto row_deg = degrees(g, NodeClass::row);
    const auto col_deg = degrees(g, NodeClass::col);
    const double nr = static_cast<double>(g.num_rows());
    const double nc = static_cast<double>(g.num_cols());
    const double row_denom =
        opt.expectation == OverlapExpectation::pairwise_rate ? nc * nc : nc;
    const double col_denom =
        opt.expectation == OverlapExpectation::pairwise_rate ? nr * nr : nr;
    const BitMatrix fwd = bit_rows(g);
    const BitMatrix rev = bit_cols(g);

    double total = 0;
    std::vector<std::uint64_t> mask;
    for (int cm = 0; cm < grp.k; ++cm) {
        const auto& rows = grp.rows[static_cast<std::size_t>(cm)];
        const auto& cols = grp.cols[static_cast<std::size_t>(cm)];

        if (rows.size() >= 2) {
            mask.assign(fwd.words, 0);
            for (int c : cols) mask[static_cast<std::size_t>(c) / 64] |=
                std::uint64_t{1} << (static_cast<std::size_t>(c) % 64);
            double sum = 0;
            for (std::size_t a = 0; a < rows.size(); ++a) {
                for (std::size_t b = a + 1; b < rows.size(); ++b) {
                    const int i = rows[a], j = rows[b];
                    const int di = row_deg[static_cast<std::size_t>(i)];
                    const int dj = row_deg[static_cast<std::size_t>(j)];
                    if (di == dj) continue;
                    const int hi = di > dj ? i : j, lo = di > dj ? j : i;
                    const int dlo = row_deg[static_cast<std::size_t>(lo)];
                    if (dlo == 0) continue;
                    const std::uint64_t* ph = fwd.row_ptr(static_cast<std::size_t>(hi));
                    const std::uint64_t* pl = fwd.row_ptr(static_cast<std::size_t>(lo));
                    std::size_t o = 0;
                    for (std::size_t w = 0; w < fwd.words; ++w)
                        o += static_cast<std::size_t>(std::popcount(ph[w] & pl[w] & mask[w]));
                    const double expected = static_cast<double>(di) * static_cast<double>(dj) / row_denom;
                    sum += (static_cast<double>(o) - expected) / dlo;
                }
            }
            total += sum / (static_cast<double>(rows.size()) - 1.0);
        }
        if (cols.size() >= 2) {
            mask.assign(rev.words, 0);
            for (int r : rows) mask[static_cast<std::size_t>(r) / 64] |=
                std::uint64_t{1} << (static_cast<std::size_t>(r) % 64);
            double sum = 0;
            for (std::size_t a = 0; a < cols.size(); ++a) {
                for (std::size_t b = a + 1; b < cols.size(); ++b) {
                    const int i = cols[a], j = cols[b];
                    const int di = col_deg[static_cast<std::size_t>(i)];
                    const int dj = col_deg[static_cast<std::size_t>(j)];
                    if (di == dj) continue;
                    const int hi = di > dj ? i : j, lo = di > dj ? j : i;
                    const int dlo = col_deg[static_cast<std::size_t>(lo)];
                    if (dlo == 0) continue;
                    const std::uint64_t* ph = rev.row_ptr(static_cast<std::size_t>(hi));
                    const std::uint64_t* pl = rev.row_ptr(static_cast<std::size_t>(lo));
                    std::size_t o = 0;
                    for (std::size_t w = 0; w < rev.words; ++w)
                        o += static_cast<std::size_t>(std::popcount(ph[w] & pl[w] & mask[w]));
                    const double expected = static_cast<double>(di) * static_cast<double>(dj) / col_denom;
                    sum += (static_cast<double>(o) - expected) / dlo;
                }
            }
            total += sum / (static_cast<double>(cols.size()) - 1.0);
        }
    }
    return 2.0 / (nr + nc) * total;
}

// ---------------------------------------------------------------------------
// Extremal optimisation engine.

namespace {

struct EoContext {
    const BipartiteGraph* g = nullptr;
    CommunityObjective objective = CommunityObjective::nestedness;
    std::vector<int> row_deg, col_deg;  // global degrees
    double pref = 0;                    // 2 / (nr + nc)
    double row_exp_denom = 1, col_exp_denom = 1;
    double inv_e = 0;
    double min_gain = 1e-12;
    int non_improving_factor = 3;
    bool check_bookkeeping = true;

    std::vector<int>* out_rows = nullptr;
    std::vector<int>* out_cols = nullptr;
    int next_community = 0;
    int accepted_splits = 0;
};

// One bisection level over a subset of the graph. Node v in [0, R) is a
// local row, v in [R, N) a local column.
class Level {
public:
    Level(const EoContext& ctx, std::vector<int> rows_g, std::vector<int> cols_g)
        : ctx_(ctx), rows_g_(std::move(rows_g)), cols_g_(std::move(cols_g)) {
        R_ = static_cast<int>(rows_g_.size());
        K_ = static_cast<int>(cols_g_.size());
        N_ = R_ + K_;
        Wr_ = (R_ + 63) / 64;
        Wc_ = (K_ + 63) / 64;

        std::vector<int> col_local(ctx_.g->num_cols(), -1);
        for (int a = 0; a < K_; ++a) col_local[static_cast<std::size_t>(cols_g_[static_cast<std::size_t>(a)])] = a;

        rowbits_.assign(static_cast<std::size_t>(R_) * static_cast<std::size_t>(Wc_), 0);
        colbits_.assign(static_cast<std::size_t>(K_) * static_cast<std::size_t>(Wr_), 0);
        row_nb_.resize(static_cast<std::size_t>(R_));
        col_nb_.resize(static_cast<std::size_t>(K_));
        rdeg_.resize(static_cast<std::size_t>(R_));
        cdeg_.resize(static_cast<std::size_t>(K_));
        for (int i = 0; i < R_; ++i) {
            const int gi = rows_g_[static_cast<std::size_t>(i)];
            rdeg_[static_cast<std::size_t>(i)] = ctx_.row_deg[static_cast<std::size_t>(gi)];
            for (const auto& [c, w] : ctx_.g->row_neighbors(gi)) {
                (void)w;
                const int a = col_local[static_cast<std::size_t>(c)];
                if (a < 0) continue;
                row_nb_[static_cast<std::size_t>(i)].push_back(a);
                col_nb_[static_cast<std::size_t>(a)].push_back(i);
                rowbits_[static_cast<std::size_t>(i) * static_cast<std::size_t>(Wc_) +
                         static_cast<std::size_t>(a) / 64] |= std::uint64_t{1} << (a % 64);
                colbits_[static_cast<std::size_t>(a) * static_cast<std::size_t>(Wr_) +
                         static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (i % 64);
            }
        }
        for (int a = 0; a < K_; ++a)
            cdeg_[static_cast<std::size_t>(a)] =
                ctx_.col_deg[static_cast<std::size_t>(cols_g_[static_cast<std::size_t>(a)])];
    }

    struct Outcome {
        double best_total = 0;
        std::vector<char> best_sides;  // size N
    };

    Outcome run(Rng& rng) {
        init_random_balanced(rng);
        rebuild_state();

        Outcome out;
        out.best_total = total();
        out.best_sides = sides_snapshot();

        const double tau = 1.0 + 1.0 / std::log(static_cast<double>(N_));
        std::vector<double> cum(static_cast<std::size_t>(N_));
        double acc = 0;
        for (int k = 1; k <= N_; ++k) {
            acc += std::pow(static_cast<double>(k), -tau);
            cum[static_cast<std::size_t>(k - 1)] = acc;
        }

        std::vector<int> order(static_cast<std::size_t>(N_));
        std::vector<double> fit(static_cast<std::size_t>(N_));
        const long long limit =
            static_cast<long long>(ctx_.non_improving_factor) * static_cast<long long>(N_);
        long long flat = 0;
        while (flat < limit) {
            for (int v = 0; v < N_; ++v) fit[static_cast<std::size_t>(v)] = fitness(v);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double fa = fit[static_cast<std::size_t>(a)], fb = fit[static_cast<std::size_t>(b)];
                if (fa != fb) return fa < fb;
                return a < b;
            });
            const double u = rng.u01() * cum[static_cast<std::size_t>(N_ - 1)];
            const auto it = std::lower_bound(cum.begin(), cum.end(), u);
            const std::size_t rank = std::min<std::size_t>(
                static_cast<std::size_t>(it - cum.begin()), static_cast<std::size_t>(N_ - 1));
            flip(order[rank]);
            const double t_now = total();
            if (t_now > out.best_total + 1e-12) {
                out.best_total = t_now;
                out.best_sides = sides_snapshot();
                flat = 0;
            } else {
                ++flat;
            }
        }
        return out;
    }

    // Direct evaluation of a side assignment, no incremental state.
    double evaluate(const std::vector<char>& sides) const {
        double t = 0;
        for (int s = 0; s < 2; ++s) t += evaluate_side(sides, s);
        return t;
    }

    // The level kept as a single community.
    double evaluate_single() const {
        return evaluate_side(std::vector<char>(static_cast<std::size_t>(N_), 0), 0);
    }

    const std::vector<int>& rows_global() const { return rows_g_; }
    const std::vector<int>& cols_global() const { return cols_g_; }
    int size() const { return N_; }

private:
    const EoContext& ctx_;
    std::vector<int> rows_g_, cols_g_;
    int R_ = 0, K_ = 0, N_ = 0, Wr_ = 0, Wc_ = 0;
    std::vector<std::uint64_t> rowbits_, colbits_;
    std::vector<std::vector<int>> row_nb_, col_nb_;
    std::vector<int> rdeg_, cdeg_;

    std::vector<char> side_r_, side_c_;
    std::vector<std::uint64_t> rowmask_[2], colmask_[2];
    int Rs_[2] = {0, 0}, Ks_[2] = {0, 0};

    // nestedness state
    double RS_[2] = {0, 0}, CS_[2] = {0, 0};
    std::vector<double> rawR_, rawC_;

    // modularity state
    double Ls_[2] = {0, 0}, DRs_[2] = {0, 0}, DCs_[2] = {0, 0};
    std::vector<int> in_side_r_, in_side_c_;

    const std::uint64_t* row_ptr(int i) const {
        return rowbits_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(Wc_);
    }
    const std::uint64_t* col_ptr(int a) const {
        return colbits_.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(Wr_);
    }

    std::vector<char> sides_snapshot() const {
        std::vector<char> s(static_cast<std::size_t>(N_));
        for (int i = 0; i < R_; ++i) s[static_cast<std::size_t>(i)] = side_r_[static_cast<std::size_t>(i)];
        for (int a = 0; a < K_; ++a) s[static_cast<std::size_t>(R_ + a)] = side_c_[static_cast<std::size_t>(a)];
        return s;
    }

    void init_random_balanced(Rng& rng) {
        std::vector<int> nodes(static_cast<std::size_t>(N_));
        std::iota(nodes.begin(), nodes.end(), 0);
        rng.shuffle(nodes);
        side_r_.assign(static_cast<std::size_t>(R_), 0);
        side_c_.assign(static_cast<std::size_t>(K_), 0);
        const int half = (N_ + 1) / 2;
        for (int pos = 0; pos < N_; ++pos) {
            const char s = pos < half ? 0 : 1;
            const int v = nodes[static_cast<std::size_t>(pos)];
            if (v < R_) side_r_[static_cast<std::size_t>(v)] = s;
            else side_c_[static_cast<std::size_t>(v - R_)] = s;
        }
    }

    double row_pair_term(int i, int j, const std::uint64_t* cmask) const {
        const int di = rdeg_[static_cast<std::size_t>(i)], dj = rdeg_[static_cast<std::size_t>(j)];
        if (di == dj) return 0;
        const int hi = di > dj ? i : j, lo = di > dj ? j : i;
        const int dlo = rdeg_[static_cast<std::size_t>(lo)];
        if (dlo == 0) return 0;
        const std::uint64_t* ph = row_ptr(hi);
        const std::uint64_t* pl = row_ptr(lo);
        std::size_t o = 0;
        for (int w = 0; w < Wc_; ++w)
            o += static_cast<std::size_t>(std::popcount(ph[w] & pl[w] & cmask[w]));
        const double expected =
            static_cast<double>(di) * static_cast<double>(dj) / ctx_.row_exp_denom;
        return (static_cast<double>(o) - expected) / dlo;
    }

    double col_pair_term(int a, int b, const std::uint64_t* rmask) const {
        const int da = cdeg_[static_cast<std::size_t>(a)], db = cdeg_[static_cast<std::size_t>(b)];
        if (da == db) return 0;
        const int hi = da > db ? a : b, lo = da > db ? b : a;
        const int dlo = cdeg_[static_cast<std::size_t>(lo)];
        if (dlo == 0) return 0;
        const std::uint64_t* ph = col_ptr(hi);
        const std::uint64_t* pl = col_ptr(lo);
        std::size_t o = 0;
        for (int w = 0; w < Wr_; ++w)
            o += static_cast<std::size_t>(std::popcount(ph[w] & pl[w] & rmask[w]));
        const double expected =
            static_cast<double>(da) * static_cast<double>(db) / ctx_.col_exp_denom;
        return (static_cast<double>(o) - expected) / dlo;
    }

    void rebuild_state() {
        for (int s = 0; s < 2; ++s) {
            rowmask_[s].assign(static_cast<std::size_t>(Wr_), 0);
            colmask_[s].assign(static_cast<std::size_t>(Wc_), 0);
            Rs_[s] = Ks_[s] = 0;
            RS_[s] = CS_[s] = 0;
            Ls_[s] = DRs_[s] = DCs_[s] = 0;
        }
        for (int i = 0; i < R_; ++i) {
            const int s = side_r_[static_cast<std::size_t>(i)];
            rowmask_[s][static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (i % 64);
            ++Rs_[s];
        }
        for (int a = 0; a < K_; ++a) {
            const int s = side_c_[static_cast<std::size_t>(a)];
            colmask_[s][static_cast<std::size_t>(a) / 64] |= std::uint64_t{1} << (a % 64);
            ++Ks_[s];
        }

        if (ctx_.objective == CommunityObjective::nestedness) {
            rawR_.assign(static_cast<std::size_t>(R_), 0.0);
            rawC_.assign(static_cast<std::size_t>(K_), 0.0);
            for (int i = 0; i < R_; ++i)
                for (int j = i + 1; j < R_; ++j) {
                    if (side_r_[static_cast<std::size_t>(i)] != side_r_[static_cast<std::size_t>(j)]) continue;
                    const int s = side_r_[static_cast<std::size_t>(i)];
                    const double t = row_pair_term(i, j, colmask_[s].data());
                    RS_[s] += t;
                    rawR_[static_cast<std::size_t>(i)] += t;
                    rawR_[static_cast<std::size_t>(j)] += t;
                }
            for (int a = 0; a < K_; ++a)
                for (int b = a + 1; b < K_; ++b) {
                    if (side_c_[static_cast<std::size_t>(a)] != side_c_[static_cast<std::size_t>(b)]) continue;
                    const int s = side_c_[static_cast<std::size_t>(a)];
                    const double t = col_pair_term(a, b, rowmask_[s].data());
                    CS_[s] += t;
                    rawC_[static_cast<std::size_t>(a)] += t;
                    rawC_[static_cast<std::size_t>(b)] += t;
                }
        } else {
            in_side_r_.assign(static_cast<std::size_t>(R_), 0);
            in_side_c_.assign(static_cast<std::size_t>(K_), 0);
            for (int i = 0; i < R_; ++i) {
                const int s = side_r_[static_cast<std::size_t>(i)];
                DRs_[s] += rdeg_[static_cast<std::size_t>(i)];
                for (int a : row_nb_[static_cast<std::size_t>(i)]) {
                    if (side_c_[static_cast<std::size_t>(a)] == s) {
                        Ls_[s] += 1.0;
                        ++in_side_r_[static_cast<std::size_t>(i)];
                    }
                }
            }
            for (int a = 0; a < K_; ++a) {
                const int s = side_c_[static_cast<std::size_t>(a)];
                DCs_[s] += cdeg_[static_cast<std::size_t>(a)];
                for (int i : col_nb_[static_cast<std::size_t>(a)])
                    if (side_r_[static_cast<std::size_t>(i)] == s) ++in_side_c_[static_cast<std::size_t>(a)];
            }
        }
    }

    double side_total(int s) const {
        if (ctx_.objective == CommunityObjective::nestedness) {
            double t = 0;
            if (Rs_[s] >= 2) t += RS_[s] / (Rs_[s] - 1);
            if (Ks_[s] >= 2) t += CS_[s] / (Ks_[s] - 1);
            return ctx_.pref * t;
        }
        return ctx_.inv_e * (Ls_[s] - DRs_[s] * DCs_[s] * ctx_.inv_e);
    }

    double total() const { return side_total(0) + side_total(1); }

    double fitness(int v) const {
        if (ctx_.objective == CommunityObjective::nestedness) {
            if (v < R_) {
                const int s = side_r_[static_cast<std::size_t>(v)];
                const int d = rdeg_[static_cast<std::size_t>(v)];
                if (Rs_[s] < 2 || d == 0) return 0;
                return ctx_.pref * rawR_[static_cast<std::size_t>(v)] / (2.0 * (Rs_[s] - 1)) / d;
            }
            const int a = v - R_;
            const int s = side_c_[static_cast<std::size_t>(a)];
            const int d = cdeg_[static_cast<std::size_t>(a)];
            if (Ks_[s] < 2 || d == 0) return 0;
            return ctx_.pref * rawC_[static_cast<std::size_t>(a)] / (2.0 * (Ks_[s] - 1)) / d;
        }
        if (v < R_) {
            const int s = side_r_[static_cast<std::size_t>(v)];
            const int d = rdeg_[static_cast<std::size_t>(v)];
            if (d == 0) return 0;
            const double contrib = ctx_.inv_e * (0.5 * in_side_r_[static_cast<std::size_t>(v)] -
                                                 0.5 * d * DCs_[s] * ctx_.inv_e);
            return contrib / d;
        }
        const int a = v - R_;
        const int s = side_c_[static_cast<std::size_t>(a)];
        const int d = cdeg_[static_cast<std::size_t>(a)];
        if (d == 0) return 0;
        const double contrib =
            ctx_.inv_e * (0.5 * in_side_c_[static_cast<std::size_t>(a)] - 0.5 * d * DRs_[s] * ctx_.inv_e);
        return contrib / d;
    }

    void flip(int v) {
        if (v < R_) flip_row(v);
        else flip_col(v - R_);
    }

    void flip_row(int x) {
        const int s = side_r_[static_cast<std::size_t>(x)];
        const int t = 1 - s;
        if (ctx_.objective == CommunityObjective::nestedness) {
            // Pairs with other rows leave side s and enter side t.
            for (int j = 0; j < R_; ++j) {
                if (j == x) continue;
                if (side_r_[static_cast<std::size_t>(j)] == s) {
                    const double term = row_pair_term(x, j, colmask_[s].data());
                    RS_[s] -= term;
                    rawR_[static_cast<std::size_t>(j)] -= term;
                }
            }
            rawR_[static_cast<std::size_t>(x)] = 0;
            for (int j = 0; j < R_; ++j) {
                if (j == x) continue;
                if (side_r_[static_cast<std::size_t>(j)] == t) {
                    const double term = row_pair_term(x, j, colmask_[t].data());
                    RS_[t] += term;
                    rawR_[static_cast<std::size_t>(j)] += term;
                    rawR_[static_cast<std::size_t>(x)] += term;
                }
            }
            // Column pairs sharing x lose or gain one unit of overlap.
            update_col_pairs_for_row(x, s, -1.0);
            update_col_pairs_for_row(x, t, +1.0);
        } else {
            int es = 0, et = 0;
            for (int a : row_nb_[static_cast<std::size_t>(x)]) {
                const int sc = side_c_[static_cast<std::size_t>(a)];
                if (sc == s) { ++es; --in_side_c_[static_cast<std::size_t>(a)]; }
                else { ++et; ++in_side_c_[static_cast<std::size_t>(a)]; }
            }
            Ls_[s] -= es;
            Ls_[t] += et;
            DRs_[s] -= rdeg_[static_cast<std::size_t>(x)];
            DRs_[t] += rdeg_[static_cast<std::size_t>(x)];
            in_side_r_[static_cast<std::size_t>(x)] = et;
        }
        side_r_[static_cast<std::size_t>(x)] = static_cast<char>(t);
        rowmask_[s][static_cast<std::size_t>(x) / 64] &= ~(std::uint64_t{1} << (x % 64));
        rowmask_[t][static_cast<std::size_t>(x) / 64] |= std::uint64_t{1} << (x % 64);
        --Rs_[s];
        ++Rs_[t];
    }

    void flip_col(int y) {
        const int s = side_c_[static_cast<std::size_t>(y)];
        const int t = 1 - s;
        if (ctx_.objective == CommunityObjective::nestedness) {
            for (int b = 0; b < K_; ++b) {
                if (b == y) continue;
                if (side_c_[static_cast<std::size_t>(b)] == s) {
                    const double term = col_pair_term(y, b, rowmask_[s].data());
                    CS_[s] -= term;
                    rawC_[static_cast<std::size_t>(b)] -= term;
                }
            }
            rawC_[static_cast<std::size_t>(y)] = 0;
            for (int b = 0; b < K_; ++b) {
                if (b == y) continue;
                if (side_c_[static_cast<std::size_t>(b)] == t) {
                    const double term = col_pair_term(y, b, rowmask_[t].data());
                    CS_[t] += term;
                    rawC_[static_cast<std::size_t>(b)] += term;
                    rawC_[static_cast<std::size_t>(y)] += term;
                }
            }
            update_row_pairs_for_col(y, s, -1.0);
            update_row_pairs_for_col(y, t, +1.0);
        } else {
            int es = 0, et = 0;
            for (int i : col_nb_[static_cast<std::size_t>(y)]) {
                const int sr = side_r_[static_cast<std::size_t>(i)];
                if (sr == s) { ++es; --in_side_r_[static_cast<std::size_t>(i)]; }
                else { ++et; ++in_side_r_[static_cast<std::size_t>(i)]; }
            }
            Ls_[s] -= es;
            Ls_[t] += et;
            DCs_[s] -= cdeg_[static_cast<std::size_t>(y)];
            DCs_[t] += cdeg_[static_cast<std::size_t>(y)];
            in_side_c_[static_cast<std::size_t>(y)] = et;
        }
        side_c_[static_cast<std::size_t>(y)] = static_cast<char>(t);
        colmask_[s][static_cast<std::size_t>(y) / 64] &= ~(std::uint64_t{1} << (y % 64));
        colmask_[t][static_cast<std::size_t>(y) / 64] |= std::uint64_t{1} << (y % 64);
        --Ks_[s];
        ++Ks_[t];
    }

    // Row x is about to leave (sign -1) or has entered (sign +1) the side
    // holding the listed columns; adjust the overlap part of their pair
    // terms. Only pairs with both columns neighbouring x change.
    void update_col_pairs_for_row(int x, int side, double sign) {
        thread_local std::vector<int> members;
        members.clear();
        for (int a : row_nb_[static_cast<std::size_t>(x)])
            if (side_c_[static_cast<std::size_t>(a)] == side) members.push_back(a);
        for (std::size_t p = 0; p < members.size(); ++p) {
            for (std::size_t q = p + 1; q < members.size(); ++q) {
                const int a = members[p], b = members[q];
                const int da = cdeg_[static_cast<std::size_t>(a)], db = cdeg_[static_cast<std::size_t>(b)];
                if (da == db) continue;
                const int dlo = std::min(da, db);
                if (dlo == 0) continue;
                const double delta = sign / dlo;
                CS_[side] += delta;
                rawC_[static_cast<std::size_t>(a)] += delta;
                rawC_[static_cast<std::size_t>(b)] += delta;
            }
        }
    }

    void update_row_pairs_for_col(int y, int side, double sign) {
        thread_local std::vector<int> members;
        members.clear();
        for (int i : col_nb_[static_cast<std::size_t>(y)])
            if (side_r_[static_cast<std::size_t>(i)] == side) members.push_back(i);
        for (std::size_t p = 0; p < members.size(); ++p) {
            for (std::size_t q = p + 1; q < members.size(); ++q) {
                const int i = members[p], j = members[q];
                const int di = rdeg_[static_cast<std::size_t>(i)], dj = rdeg_[static_cast<std::size_t>(j)];
                if (di == dj) continue;
                const int dlo = std::min(di, dj);
                if (dlo == 0) continue;
                const double delta = sign / dlo;
                RS_[side] += delta;
                rawR_[static_cast<std::size_t>(i)] += delta;
                rawR_[static_cast<std::size_t>(j)] += delta;
            }
        }
    }

    double evaluate_side(const std::vector<char>& sides, int s) const {
        if (ctx_.objective == CommunityObjective::nestedness) {
            std::vector<std::uint64_t> cmask(static_cast<std::size_t>(Wc_), 0);
            std::vector<std::uint64_t> rmask(static_cast<std::size_t>(Wr_), 0);
            int rs = 0, ks = 0;
            for (int i = 0; i < R_; ++i)
                if (sides[static_cast<std::size_t>(i)] == s) {
                    rmask[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (i % 64);
                    ++rs;
                }
            for (int a = 0; a < K_; ++a)
                if (sides[static_cast<std::size_t>(R_ + a)] == s) {
                    cmask[static_cast<std::size_t>(a) / 64] |= std::uint64_t{1} << (a % 64);
                    ++ks;
                }
            double rsum = 0, csum = 0;
            if (rs >= 2) {
                for (int i = 0; i < R_; ++i) {
                    if (sides[static_cast<std::size_t>(i)] != s) continue;
                    for (int j = i + 1; j < R_; ++j)
                        if (sides[static_cast<std::size_t>(j)] == s)
                            rsum += row_pair_term(i, j, cmask.data());
                }
            }
            if (ks >= 2) {
                for (int a = 0; a < K_; ++a) {
                    if (sides[static_cast<std::size_t>(R_ + a)] != s) continue;
                    for (int b = a + 1; b < K_; ++b)
                        if (sides[static_cast<std::size_t>(R_ + b)] == s)
                            csum += col_pair_term(a, b, rmask.data());
                }
            }
            double t = 0;
            if (rs >= 2) t += rsum / (rs - 1);
            if (ks >= 2) t += csum / (ks - 1);
            return ctx_.pref * t;
        }
        double inside = 0, dr = 0, dc = 0;
        for (int i = 0; i < R_; ++i) {
            if (sides[static_cast<std::size_t>(i)] != s) continue;
            dr += rdeg_[static_cast<std::size_t>(i)];
            for (int a : row_nb_[static_cast<std::size_t>(i)])
                if (sides[static_cast<std::size_t>(R_ + a)] == s) inside += 1.0;
        }
        for (int a = 0; a < K_; ++a)
            if (sides[static_cast<std::size_t>(R_ + a)] == s) dc += cdeg_[static_cast<std::size_t>(a)];
        return ctx_.inv_e * (inside - dr * dc * ctx_.inv_e);
    }
};

void recurse(EoContext& ctx, const std::vector<int>& rows_g, const std::vector<int>& cols_g,
             Rng& rng) {
    const int n = static_cast<int>(rows_g.size() + cols_g.size());
    if (n >= 3) {
        Level level(ctx, rows_g, cols_g);
        const auto outcome = level.run(rng);
        const double single = level.evaluate_single();
        if (outcome.best_total > single + ctx.min_gain) {
            if (ctx.check_bookkeeping) {
                const double direct = level.evaluate(outcome.best_sides);
                if (std::abs(direct - outcome.best_total) > 1e-9)
                    throw std::logic_error(
                        "incremental objective bookkeeping diverged from direct evaluation");
            }
            std::vector<int> r0, r1, c0, c1;
            for (std::size_t i = 0; i < rows_g.size(); ++i)
                (outcome.best_sides[i] == 0 ? r0 : r1).push_back(rows_g[i]);
            for (std::size_t a = 0; a < cols_g.size(); ++a)
                (outcome.best_sides[rows_g.size() + a] == 0 ? c0 : c1).push_back(cols_g[a]);
            if (!(r0.empty() && c0.empty()) && !(r1.empty() && c1.empty())) {
                ++ctx.accepted_splits;
                recurse(ctx, r0, c0, rng);
                recurse(ctx, r1, c1, rng);
                return;
            }
        }
    }
    const int id = ctx.next_community++;
    for (int r : rows_g) (*ctx.out_rows)[static_cast<std::size_t>(r)] = id;
    for (int c : cols_g) (*ctx.out_cols)[static_cast<std::size_t>(c)] = id;
}

}  // namespace

OptimizeResult optimize_communities(const BipartiteGraph& g, const OptimizeOptions& opt) {
    if (opt.restarts < 1) throw std::invalid_argument("restarts must be positive");
    if (g.num_edges() == 0) throw std::runtime_error("community search needs at least one edge");

    EoContext base;
    base.g = &g;
    base.objective = opt.objective;
    base.row_deg = degrees(g, NodeClass::row);
    base.col_deg = degrees(g, NodeClass::col);
    const double nr = static_cast<double>(g.num_rows());
    const double nc = static_cast<double>(g.num_cols());
    base.pref = 2.0 / (nr + nc);
    base.row_exp_denom = opt.expectation == OverlapExpectation::pairwise_rate ? nc * nc : nc;
    base.col_exp_denom = opt.expectation == OverlapExpectation::pairwise_rate ? nr * nr : nr;
    base.inv_e = 1.0 / static_cast<double>(g.num_edges());
    base.min_gain = opt.min_gain;
    base.non_improving_factor = opt.non_improving_factor;
    base.check_bookkeeping = opt.check_bookkeeping;

    std::vector<int> all_rows(g.num_rows()), all_cols(g.num_cols());
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_cols.begin(), all_cols.end(), 0);

    OptimizeResult best;
    bool have_best = false;
    for (int r = 0; r < opt.restarts; ++r) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(r);
        EoContext ctx = base;
        Partition p;
        p.row_community.assign(g.num_rows(), -1);
        p.col_community.assign(g.num_cols(), -1);
        ctx.out_rows = &p.row_community;
        ctx.out_cols = &p.col_community;
        Rng rng(seed);
        recurse(ctx, all_rows, all_cols, rng);

        MetricOptions mo;
        mo.expectation = opt.expectation;
        const double value = opt.objective == CommunityObjective::nestedness
                                 ? in_block_nestedness(g, p, mo)
                                 : barber_modularity(g, p);
        if (!have_best || value > best.objective_value) {
            best.partition = normalized(p);
            best.objective_value = value;
            best.accepted_splits = ctx.accepted_splits;
            best.seed = seed;
            have_best = true;
        }
    }
    return best;
}

CompositionReport composition_report(
    const BipartiteGraph& g, const Partition& p,
    const std::unordered_map<std::string, std::string>* col_attribute) {
    const Grouped grp = group_communities(g, p);
    const auto row_strength = strengths(g, NodeClass::row);
    const double total_strength = std::accumulate(row_strength.begin(), row_strength.end(), 0.0);

    CompositionReport report;
    for (int c = 0; c < grp.k; ++c) {
        CompositionEntry e;
        e.community = c;
        e.n_rows = grp.rows[static_cast<std::size_t>(c)].size();
        e.n_cols = grp.cols[static_cast<std::size_t>(c)].size();
        e.row_share = 100.0 * static_cast<double>(e.n_rows) / static_cast<double>(g.num_rows());
        e.col_share = 100.0 * static_cast<double>(e.n_cols) / static_cast<double>(g.num_cols());
        double s = 0;
        for (int r : grp.rows[static_cast<std::size_t>(c)]) s += row_strength[static_cast<std::size_t>(r)];
        e.strength_share = total_strength > 0 ? 100.0 * s / total_strength : 0.0;

        if (col_attribute) {
            std::map<std::string, int> counts;
            for (int j : grp.cols[static_cast<std::size_t>(c)]) {
                const auto& id = g.col_ids()[static_cast<std::size_t>(j)];
                auto it = col_attribute->find(id);
                if (it == col_attribute->end())
                    throw std::runtime_error("no attribute recorded for column " + id);
                ++counts[it->second];
            }
            e.unique_attributes = static_cast<int>(counts.size());
            std::vector<std::pair<std::string, int>> sorted(counts.begin(), counts.end());
            std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            if (sorted.size() > 5) sorted.resize(5);
            e.top_attributes = std::move(sorted);
        }
        report.entries.push_back(std::move(e));
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const CompositionEntry& a, const CompositionEntry& b) {
                  if (a.row_share != b.row_share) return a.row_share > b.row_share;
                  return a.community < b.community;
              });
    return report;
}

}  // namespace nestkit
