#include "minliq/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>

#include "minliq/errors.hpp"

namespace minliq {

Moments moments(const std::vector<double>& sample) {
    Moments m;
    m.n = sample.size();
    if (m.n == 0) {
        m.degenerate = true;
        return m;
    }
    double s = 0.0;
    for (double v : sample) s += v;
    m.mean = s / static_cast<double>(m.n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sample) {
        const double d = v - m.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(m.n);
    m.variance = m.n > 1 ? m2 / (n - 1.0) : 0.0;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) {
        m.degenerate = true;
        return m;
    }
    m.skew = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return m;
}

CdfTable empirical_cdf(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    CdfTable t;
    const double n = static_cast<double>(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (i + 1 < sample.size() && sample[i + 1] == sample[i]) continue;
        t.x.push_back(sample[i]);
        t.F.push_back(static_cast<double>(i + 1) / n);
    }
    return t;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }

QQTable qq_table(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    QQTable q;
    const double n = static_cast<double>(sample.size());
    q.normal.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        q.normal.push_back(normal_quantile((static_cast<double>(i) + 0.5) / n));
    q.sample = std::move(sample);
    return q;
}

ExpTailFit exponential_tail_fit(std::vector<double> sample) {
    if (sample.size() < 100) throw InsufficientData("exponential tail fit needs at least 100 positive values");
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    ExpTailFit f;
    f.n = n;
    double total = 0.0;
    for (double v : sample) total += v;
    f.mean = total / static_cast<double>(n);

    const auto lo = static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(n)));
    const auto hi = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    std::vector<double> xs, ys;
    for (std::size_t i = lo; i < hi && i < n; ++i) {
        xs.push_back(sample[i]);
        ys.push_back(-std::log(static_cast<double>(n - i) / static_cast<double>(n)));
    }
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientData("tail sample has no spread");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    f.ratio = f.slope * f.mean;
    return f;
}

ExpTailFit exponential_tail_check(const std::vector<PathRecord>& records) {
    std::vector<double> pos;
    for (const auto& r : records)
        if (!r.liquidated) pos.push_back(r.fqT);
    return exponential_tail_fit(std::move(pos));
}

int bucket_of(const PathRecord& record) {
    if (record.liquidated) return 0;
    return 1 + std::max(0, static_cast<int>(std::floor((record.fqT - 0.025) / 0.07)));
}

Bucket bucket_info(int index) {
    Bucket b;
    b.index = index;
    if (index == 0) return b;
    b.center = 0.06 + 0.07 * (index - 1);
    b.lo = b.center - 0.035;
    b.hi = b.center + 0.035;
    return b;
}

namespace {

std::vector<double> column(const std::vector<PathRecord>& records, double PathRecord::*field, bool traded_only) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (traded_only && r.no_trades) continue;
        out.push_back(r.*field);
    }
    return out;
}

std::optional<double> median(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunSummary summarize(std::vector<PathRecord> records) {
    if (records.size() < 100) throw InsufficientData("summary needs at least 100 records");
    std::sort(records.begin(), records.end(),
              [](const PathRecord& a, const PathRecord& b) { return a.path_index < b.path_index; });
    RunSummary s;
    s.n_paths = records.size();
    const double n = static_cast<double>(s.n_paths);

    std::size_t liq = 0;
    std::vector<double> pos;
    for (const auto& r : records) {
        if (r.no_trades) ++s.n_no_trades;
        if (r.liquidated)
            ++liq;
        else
            pos.push_back(r.fqT);
    }
    s.p_liquidated = static_cast<double>(liq) / n;
    s.p_liquidated_se = std::sqrt(s.p_liquidated * (1.0 - s.p_liquidated) / n);
    s.n_positive = pos.size();
    if (!pos.empty()) {
        const Moments m = moments(pos);
        s.mean_fq_pos = m.mean;
        s.sd_fq_pos = std::sqrt(m.variance);
        s.mean_fq_pos_se = std::sqrt(m.variance / static_cast<double>(m.n));
    }

    s.A = moments(column(records, &PathRecord::A, true));
    s.A1 = moments(column(records, &PathRecord::A1, true));
    s.A2 = moments(column(records, &PathRecord::A2, true));
    s.A3 = moments(column(records, &PathRecord::A3, true));

    s.cdf_tables["fqT_pos"] = empirical_cdf(pos);
    s.cdf_tables["A"] = empirical_cdf(column(records, &PathRecord::A, true));
    s.cdf_tables["A2"] = empirical_cdf(column(records, &PathRecord::A2, true));
    s.cdf_tables["A3"] = empirical_cdf(column(records, &PathRecord::A3, true));

    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_bucket;
    for (const auto& r : records) {
        if (r.no_trades) continue;
        auto& slot = by_bucket[bucket_of(r)];
        slot.first.push_back(r.A2);
        slot.second.push_back(r.A3);
    }
    for (auto& [idx, cols] : by_bucket)
        s.conditional.push_back({bucket_info(idx), moments(cols.first), moments(cols.second)});

    if (pos.size() >= 100) s.exp_tail = exponential_tail_fit(pos);
    return s;
}

Moments normality_moments(const std::vector<PathRecord>& records, int bucket) {
    std::vector<double> a2;
    for (const auto& r : records)
        if (!r.no_trades && bucket_of(r) == bucket) a2.push_back(r.A2);
    if (a2.size() < 200) throw InsufficientData("bucket holds fewer than 200 records");
    return moments(a2);
}

BaselineComparison compare_baseline(const std::vector<PathRecord>& records,
                                    const std::vector<PathRecord>& baseline) {
    BaselineComparison c;
    const std::pair<const char*, double PathRecord::*> fields[] = {
        {"A", &PathRecord::A}, {"A2", &PathRecord::A2}, {"A3", &PathRecord::A3}};
    for (const auto& [name, field] : fields) {
        const Moments a = moments(column(records, field, true));
        const Moments b = moments(column(baseline, field, true));
        c.rows.push_back({name, a.mean, a.variance, b.mean, b.variance});
    }
    auto liquidated_a3 = [](const std::vector<PathRecord>& rs) {
        std::vector<double> v;
        for (const auto& r : rs)
            if (r.liquidated && !r.no_trades) v.push_back(r.A3);
        return v;
    };
    c.median_A3_liquidated = median(liquidated_a3(records));
    c.base_median_A3_liquidated = median(liquidated_a3(baseline));
    return c;
}

}  // namespace minliq
