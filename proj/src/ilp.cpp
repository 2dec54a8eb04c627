#include "vcnet/ilp.hpp"

#include "vcnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vcnet {

std::size_t linear_system::add_variable(std::string name, std::int64_t upper)
{
    if (upper < 0)
        throw error("variable upper bound must be nonnegative");
    names_.push_back(std::move(name));
    upper_.push_back(upper);
    return upper_.size() - 1;
}

void linear_system::add_row(std::vector<linear_term> terms, relation rel, std::int64_t rhs, std::string name)
{
    rows_.push_back({std::move(terms), rel, rhs, std::move(name)});
}

bool linear_system::satisfied_by(const std::vector<std::int64_t>& x) const
{
    if (x.size() != upper_.size())
        return false;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] < 0 || x[j] > upper_[j])
            return false;
    for (const auto& row : rows_) {
        std::int64_t lhs = 0;
        for (const auto& t : row.terms)
            lhs += t.coef * x[t.var];
        const bool ok = row.rel == relation::le ? lhs <= row.rhs : row.rel == relation::ge ? lhs >= row.rhs : lhs == row.rhs;
        if (!ok)
            return false;
    }
    return true;
}

std::string linear_system::to_lp(const std::string& title) const
{
    std::ostringstream out;
    if (!title.empty())
        out << "\\ " << title << '\n';
    out << "minimize\n obj: 0\nsubject to\n";
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const auto& row = rows_[r];
        out << ' ' << (row.name.empty() ? "r" + std::to_string(r) : row.name) << ':';
        if (row.terms.empty())
            out << " 0";
        for (const auto& t : row.terms)
            out << ' ' << (t.coef < 0 ? "- " : "+ ") << (t.coef < 0 ? -t.coef : t.coef) << ' ' << names_[t.var];
        out << (row.rel == relation::le ? " <= " : row.rel == relation::ge ? " >= " : " = ") << row.rhs << '\n';
    }
    out << "bounds\n";
    for (std::size_t j = 0; j < upper_.size(); ++j)
        out << " 0 <= " << names_[j] << " <= " << upper_[j] << '\n';
    out << "general\n";
    for (const auto& n : names_)
        out << ' ' << n;
    out << "\nend\n";
    return out.str();
}

namespace {

constexpr double eps = 1e-7; // pivot tolerance

// Dense bounded-variable primal simplex on rows A y (=) b with 0 <= y <= cap.
class simplex
{
public:
    simplex(std::size_t rows, std::size_t cols) : m_{rows}, n_{cols}, t_(rows, std::vector<double>(cols, 0.0)) {}

    std::vector<std::vector<double>>& tableau() { return t_; }
    std::vector<double> cap;
    std::vector<double> beta;
    std::vector<std::size_t> basis;
    std::vector<bool> at_upper;

    // Minimises cost·y from the current basic solution. False if the
    // iteration cap was hit.
    bool optimise(const std::vector<double>& cost)
    {
        std::vector<bool> is_basic(n_, false);
        for (std::size_t b : basis)
            is_basic[b] = true;
        std::vector<double> d(cost);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis[i]];
            if (cb != 0.0)
                for (std::size_t j = 0; j < n_; ++j)
                    d[j] -= cb * t_[i][j];
        }
        const std::size_t cap_iter = 50 * (m_ + n_) + 1000;
        const std::size_t bland_after = 10 * (m_ + n_) + 200;
        for (std::size_t iter = 0; iter < cap_iter; ++iter) {
            const bool bland = iter > bland_after;
            std::size_t enter = n_;
            double best = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (is_basic[j] || cap[j] <= 0.0)
                    continue;
                const double score = at_upper[j] ? d[j] : -d[j];
                if (score > 1e-9 && (enter == n_ || (!bland && score > best))) {
                    enter = j;
                    best = score;
                    if (bland)
                        break;
                }
            }
            if (enter == n_)
                return true;
            const double dir = at_upper[enter] ? -1.0 : 1.0;
            double theta = cap[enter];
            std::size_t leave = m_;
            bool leave_to_upper = false;
            double leave_rate = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double rate = dir * t_[i][enter];
                double limit;
                bool upper;
                if (rate > eps) {
                    limit = beta[i] / rate;
                    upper = false;
                } else if (rate < -eps) {
                    limit = (cap[basis[i]] - beta[i]) / -rate;
                    upper = true;
                } else {
                    continue;
                }
                limit = std::max(limit, 0.0);
                // Ties go to the largest pivot, or the lowest index under Bland.
                const bool tie = leave != m_ && std::abs(limit - theta) <= 1e-12;
                if (limit < theta - 1e-12 ||
                    (tie && (bland ? basis[i] < basis[leave] : std::abs(rate) > leave_rate))) {
                    theta = limit;
                    leave = i;
                    leave_to_upper = upper;
                    leave_rate = std::abs(rate);
                }
            }
            for (std::size_t i = 0; i < m_; ++i)
                beta[i] -= dir * theta * t_[i][enter];
            if (leave == m_) {
                at_upper[enter] = !at_upper[enter];
                continue;
            }
            const std::size_t out = basis[leave];
            const double entering_value = (at_upper[enter] ? cap[enter] : 0.0) + dir * theta;
            pivot(leave, enter, d);
            beta[leave] = entering_value;
            is_basic[out] = false;
            is_basic[enter] = true;
            basis[leave] = enter;
            at_upper[out] = leave_to_upper;
            at_upper[enter] = false;
        }
        return false;
    }

private:
    void pivot(std::size_t r, std::size_t c, std::vector<double>& d)
    {
        auto& pr = t_[r];
        const double inv = 1.0 / pr[c];
        for (double& v : pr)
            v *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r)
                continue;
            const double f = t_[i][c];
            if (std::abs(f) < 1e-15)
                continue;
            auto& row = t_[i];
            for (std::size_t j = 0; j < n_; ++j)
                row[j] -= f * pr[j];
            row[c] = 0.0;
        }
        const double f = d[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j < n_; ++j)
                d[j] -= f * pr[j];
            d[c] = 0.0;
        }
    }

    std::size_t m_, n_;
    std::vector<std::vector<double>> t_;
};

// Tightens [lo, hi] against every row. False on proven infeasibility.
bool propagate(const linear_system& sys, std::vector<std::int64_t>& lo, std::vector<std::int64_t>& hi)
{
    auto floor_div = [](std::int64_t a, std::int64_t b) {
        std::int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0)))
            --q;
        return q;
    };
    for (int round = 0; round < 64; ++round) {
        bool changed = false;
        for (const auto& row : sys.rows()) {
            for (int side = 0; side < 2; ++side) {
                // side 0: sum <= rhs; side 1: -sum <= -rhs
                if (side == 0 && row.rel == relation::ge)
                    continue;
                if (side == 1 && row.rel == relation::le)
                    continue;
                const std::int64_t sign = side == 0 ? 1 : -1;
                const std::int64_t b = sign * row.rhs;
                std::int64_t minact = 0;
                for (const auto& t : row.terms) {
                    const std::int64_t a = sign * t.coef;
                    minact += a > 0 ? a * lo[t.var] : a * hi[t.var];
                }
                if (minact > b)
                    return false;
                const std::int64_t slack = b - minact;
                for (const auto& t : row.terms) {
                    const std::int64_t a = sign * t.coef;
                    if (a > 0) {
                        const std::int64_t nh = lo[t.var] + floor_div(slack, a);
                        if (nh < hi[t.var]) {
                            hi[t.var] = nh;
                            changed = true;
                        }
                    } else if (a < 0) {
                        const std::int64_t nl = hi[t.var] - floor_div(slack, -a);
                        if (nl > lo[t.var]) {
                            lo[t.var] = nl;
                            changed = true;
                        }
                    }
                    if (lo[t.var] > hi[t.var])
                        return false;
                }
            }
        }
        if (!changed)
            return true;
    }
    return true;
}

} // namespace

std::optional<std::vector<double>> solve_relaxation(const linear_system& sys, const std::vector<std::int64_t>& lower,
                                                    const std::vector<std::int64_t>& upper)
{
    const std::size_t n = sys.num_variables();
    for (std::size_t j = 0; j < n; ++j)
        if (lower[j] > upper[j])
            return std::nullopt;
    const auto& rows = sys.rows();
    const std::size_t m = rows.size();
    std::size_t slacks = 0;
    for (const auto& r : rows)
        if (r.rel != relation::eq)
            ++slacks;
    const std::size_t cols = n + slacks + m;
    simplex lp(m, cols);
    auto& t = lp.tableau();
    lp.cap.assign(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        lp.cap[j] = static_cast<double>(upper[j] - lower[j]);
    lp.beta.assign(m, 0.0);
    lp.basis.assign(m, 0);
    lp.at_upper.assign(cols, false);
    std::size_t next_slack = n;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& r = rows[i];
        // Rows are scaled to unit largest coefficient; big-M cuts otherwise
        // wreck the pivot tolerances.
        double scale = 1.0;
        for (const auto& term : r.terms)
            scale = std::max(scale, std::abs(static_cast<double>(term.coef)));
        double rhs = static_cast<double>(r.rhs) / scale;
        double minact = 0.0, maxact = 0.0;
        for (const auto& term : r.terms) {
            const double a = static_cast<double>(term.coef) / scale;
            t[i][term.var] += a;
            rhs -= a * static_cast<double>(lower[term.var]);
            const double span = a * lp.cap[term.var];
            (span > 0 ? maxact : minact) += span;
        }
        if (r.rel == relation::le) {
            t[i][next_slack] = 1.0;
            lp.cap[next_slack] = std::max(0.0, rhs - minact);
            ++next_slack;
        } else if (r.rel == relation::ge) {
            t[i][next_slack] = -1.0;
            lp.cap[next_slack] = std::max(0.0, maxact - rhs);
            ++next_slack;
        }
        const std::size_t art = n + slacks + i;
        const double sign = rhs < 0 ? -1.0 : 1.0;
        for (double& v : t[i])
            v *= sign;
        t[i][art] = 1.0;
        lp.cap[art] = std::abs(rhs) + 1.0;
        lp.beta[i] = std::abs(rhs);
        lp.basis[i] = art;
    }
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        phase1[n + slacks + i] = 1.0;
    if (!lp.optimise(phase1))
        throw error("simplex iteration limit reached");
    auto value = [&](std::size_t j) {
        for (std::size_t i = 0; i < m; ++i)
            if (lp.basis[i] == j)
                return lp.beta[i];
        return lp.at_upper[j] ? lp.cap[j] : 0.0;
    };
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        infeasibility += value(n + slacks + i);
    if (infeasibility > 1e-6)
        return std::nullopt;
    for (std::size_t i = 0; i < m; ++i)
        lp.cap[n + slacks + i] = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (lp.basis[i] >= n + slacks)
            lp.beta[i] = 0.0;
    std::vector<double> phase2(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        phase2[j] = 1.0;
    if (!lp.optimise(phase2))
        throw error("simplex iteration limit reached");
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j)
        x[j] = static_cast<double>(lower[j]) + value(j);
    return x;
}

std::optional<std::vector<std::int64_t>> feasible(const linear_system& sys, const ilp_options& opt, ilp_stats* stats)
{
    const std::size_t n = sys.num_variables();
    struct frame
    {
        std::vector<std::int64_t> lo, hi;
    };
    std::vector<frame> stack;
    stack.push_back({std::vector<std::int64_t>(n, 0), sys.upper()});
    std::size_t nodes = 0;
    ilp_stats local;
    ilp_stats& st = stats ? *stats : local;

    auto push_split = [&](frame& f, std::size_t j, std::int64_t cut) {
        // Lower half [lo, cut] explored first, so pushed last.
        frame upper_half{f.lo, f.hi};
        upper_half.lo[j] = cut + 1;
        frame lower_half{std::move(f.lo), std::move(f.hi)};
        lower_half.hi[j] = cut;
        stack.push_back(std::move(upper_half));
        stack.push_back(std::move(lower_half));
    };

    while (!stack.empty()) {
        frame f = std::move(stack.back());
        stack.pop_back();
        if (++nodes > opt.node_limit)
            throw limit_exceeded("integer feasibility search exceeded node limit", nodes);
        ++st.nodes;
        if (!propagate(sys, f.lo, f.hi))
            continue;

        std::optional<std::size_t> branch_var;
        std::int64_t cut = 0;
        if (opt.lp_bound) {
            ++st.lp_solves;
            const auto x = solve_relaxation(sys, f.lo, f.hi);
            if (!x)
                continue;
            std::vector<std::int64_t> rounded(n);
            bool integral = true;
            for (std::size_t j = 0; j < n; ++j) {
                const double r = std::round((*x)[j]);
                rounded[j] = std::clamp(static_cast<std::int64_t>(r), f.lo[j], f.hi[j]);
                if (std::abs((*x)[j] - r) > 1e-6) {
                    integral = false;
                    const std::int64_t span = f.hi[j] - f.lo[j];
                    if (span > 0 && (!branch_var || span < f.hi[*branch_var] - f.lo[*branch_var])) {
                        branch_var = j;
                        cut = std::clamp(static_cast<std::int64_t>(std::floor((*x)[j])), f.lo[j], f.hi[j] - 1);
                    }
                }
            }
            if (integral && sys.satisfied_by(rounded))
                return rounded;
            if (!branch_var) {
                // Numerically integral but not exact: split the tightest free
                // variable around its rounded value.
                for (std::size_t j = 0; j < n; ++j)
                    if (f.lo[j] < f.hi[j] && (!branch_var || f.hi[j] - f.lo[j] < f.hi[*branch_var] - f.lo[*branch_var]))
                        branch_var = j;
                if (!branch_var)
                    continue;
                cut = std::clamp(rounded[*branch_var], f.lo[*branch_var], f.hi[*branch_var] - 1);
            }
        } else {
            for (std::size_t j = 0; j < n; ++j)
                if (f.lo[j] < f.hi[j] && (!branch_var || f.hi[j] - f.lo[j] < f.hi[*branch_var] - f.lo[*branch_var]))
                    branch_var = j;
            if (!branch_var) {
                if (sys.satisfied_by(f.lo))
                    return f.lo;
                continue;
            }
            cut = f.lo[*branch_var] + (f.hi[*branch_var] - f.lo[*branch_var]) / 2;
        }
        push_split(f, *branch_var, cut);
    }
    return std::nullopt;
}

} // namespace vcnet
