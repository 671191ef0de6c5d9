#include "escdim/series.hpp"

#include <algorithm>
#include <cmath>

namespace escdim {

int RatioSeries::reliable_count() const {
    int c = 0;
    for (const auto& p : pts) {
        if (p.flagged) break;
        ++c;
    }
    return c;
}

double RatioSeries::last_reliable() const {
    int c = reliable_count();
    return c > 0 ? pts[static_cast<size_t>(c) - 1].value : 0.0;
}

double RatioSeries::limsup_estimate() const {
    int c = reliable_count();
    if (c == 0) return 0.0;
    int start = c / 2;
    double m = pts[static_cast<size_t>(start)].value;
    for (int i = start; i < c; ++i) m = std::max(m, pts[static_cast<size_t>(i)].value);
    return m;
}

double RatioSeries::liminf_estimate() const {
    int c = reliable_count();
    if (c == 0) return 0.0;
    int start = c / 2;
    double m = pts[static_cast<size_t>(start)].value;
    for (int i = start; i < c; ++i) m = std::min(m, pts[static_cast<size_t>(i)].value);
    return m;
}

void RatioSeries::finalize() { trend = classify_trend(pts, reliable_count()); }

SeriesBuilder::SeriesBuilder(std::string expression_id, int horizon) {
    s_.expression_id = std::move(expression_id);
    s_.requested_horizon = horizon;
}

void SeriesBuilder::push(int n, double value, bool flagged) {
    SeriesPoint p;
    p.n = n;
    p.flagged = flagged;
    if (std::abs(value) >= kSat) {
        p.value = value > 0 ? kSat : -kSat;
        p.saturated = true;
    } else {
        p.value = value;
    }
    if (p.flagged && s_.first_flagged == 0) s_.first_flagged = n;
    s_.pts.push_back(p);
}

void SeriesBuilder::push_sat(int n, const SatValue& v, bool extra_flag) {
    push(n, v.value, v.tight || extra_flag);
}

void SeriesBuilder::truncate(int n, std::string reason) {
    s_.truncated_at = n;
    s_.truncation_reason = std::move(reason);
}

RatioSeries SeriesBuilder::take() {
    s_.finalize();
    return std::move(s_);
}

TrendInfo classify_trend(const std::vector<SeriesPoint>& pts, int reliable_count) {
    TrendInfo t;
    if (reliable_count < 3) {
        t.detail = "too few reliable points";
        return t;
    }
    int tail = std::max(3, reliable_count / 4);
    int start = reliable_count - tail;
    std::vector<double> v;
    for (int i = start; i < reliable_count; ++i) v.push_back(pts[static_cast<size_t>(i)].value);
    double last = v.back();
    double span = 0;
    for (double x : v) span = std::max(span, std::abs(x - last));
    if (span <= std::max(1e-12, 1e-9 * std::abs(last))) {
        t.kind = TrendKind::ConvergingTo;
        t.limit = last;
        t.detail = "stable tail";
        return t;
    }
    std::vector<double> d;
    for (size_t i = 1; i < v.size(); ++i) d.push_back(v[i] - v[i - 1]);
    int sign_changes = 0;
    for (size_t i = 1; i < d.size(); ++i)
        if (d[i] * d[i - 1] < 0) ++sign_changes;
    if (sign_changes >= 2) {
        t.kind = TrendKind::Oscillating;
        return t;
    }
    bool monotone = sign_changes == 0;
    if (!monotone) {
        t.detail = "mixed tail";
        return t;
    }
    double dl = d.back();
    double df = d.front();
    if (d.size() >= 2 && std::abs(dl) > std::abs(df) * 1.05 && std::abs(dl) > 1e-12) {
        t.kind = TrendKind::Diverging;
        t.detail = dl > 0 ? "increasing, accelerating" : "decreasing, accelerating";
        return t;
    }
    // shrinking monotone differences: extrapolate a limit under a harmonic
    // (v = L + c/n) or geometric (v = L + A r^n) decay model, picking the
    // model whose invariant is more stable over the last differences
    int n_last = pts[static_cast<size_t>(reliable_count) - 1].n;
    double limit_h = last + (n_last - 1) * dl;
    double limit = limit_h;
    if (d.size() >= 3) {
        // harmonic invariant: d_k * n_k * (n_k - 1); geometric invariant: d_k / d_{k-1}
        double inv_h1 = d[d.size() - 1] * n_last * (n_last - 1);
        double inv_h2 = d[d.size() - 2] * (n_last - 1) * (n_last - 2);
        double rr1 = d[d.size() - 1] / d[d.size() - 2];
        double rr2 = d[d.size() - 2] / d[d.size() - 3];
        double var_h = std::abs(inv_h1 - inv_h2) / std::max(std::abs(inv_h1), 1e-300);
        double var_g = std::abs(rr1 - rr2) / std::max(std::abs(rr1), 1e-300);
        if (var_g < var_h && rr1 > 1e-6 && rr1 < 0.999)
            limit = last + dl * rr1 / (1 - rr1);
    }
    t.kind = TrendKind::ConvergingTo;
    t.limit = limit;
    t.detail = dl < 0 ? "monotone decreasing" : "monotone increasing";
    return t;
}

}  // namespace escdim
