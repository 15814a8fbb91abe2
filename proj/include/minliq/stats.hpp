#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minliq/path_sim.hpp"

namespace minliq {

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double skew = 0.0;
    double excess_kurtosis = 0.0;
    bool degenerate = false;  // zero variance, skew and kurtosis undefined
};

Moments moments(const std::vector<double>& sample);

struct CdfTable {
    std::vector<double> x;
    std::vector<double> F;
};

CdfTable empirical_cdf(std::vector<double> sample);

// Sorted sample against standard normal quantiles at (i + 1/2) / n.
struct QQTable {
    std::vector<double> sample;
    std::vector<double> normal;
};

QQTable qq_table(std::vector<double> sample);

double normal_cdf(double x);
double normal_quantile(double p);

struct ExpTailFit {
    std::size_t n = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double mean = 0.0;   // sample mean, 1/mean is the exponential rate
    double ratio = 0.0;  // slope * mean
};

// OLS of -log(empirical survival) on x over the central 90% of a positive sample.
ExpTailFit exponential_tail_fit(std::vector<double> sample);
ExpTailFit exponential_tail_check(const std::vector<PathRecord>& records);

// Conditioning buckets for q_T / q0. Bucket 0 holds liquidated paths, bucket
// j >= 1 is centred at 0.06 + 0.07 (j - 1) with half-width 0.035; the first
// positive bucket also takes (0, 0.025) and the last one has no upper end.
struct Bucket {
    int index = 0;
    double center = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

int bucket_of(const PathRecord& record);
Bucket bucket_info(int index);

struct BucketStats {
    Bucket bucket;
    Moments A2;
    Moments A3;
};

struct RunSummary {
    std::size_t n_paths = 0;
    std::size_t n_no_trades = 0;
    double p_liquidated = 0.0;
    double p_liquidated_se = 0.0;
    std::size_t n_positive = 0;
    std::optional<double> mean_fq_pos;  // unset when every path closed
    std::optional<double> sd_fq_pos;
    std::optional<double> mean_fq_pos_se;
    Moments A;
    Moments A1;
    Moments A2;
    Moments A3;
    std::map<std::string, CdfTable> cdf_tables;
    std::vector<BucketStats> conditional;
    std::optional<ExpTailFit> exp_tail;
};

// Needs at least 100 records. Input order does not matter.
RunSummary summarize(std::vector<PathRecord> records);

// Skew and excess kurtosis of A2 within one bucket (at least 200 records).
Moments normality_moments(const std::vector<PathRecord>& records, int bucket);

struct ComparisonRow {
    std::string name;
    double mean = 0.0;
    double variance = 0.0;
    double base_mean = 0.0;
    double base_variance = 0.0;
};

struct BaselineComparison {
    std::vector<ComparisonRow> rows;  // A, A2, A3
    std::optional<double> median_A3_liquidated;
    std::optional<double> base_median_A3_liquidated;
};

BaselineComparison compare_baseline(const std::vector<PathRecord>& records,
                                    const std::vector<PathRecord>& baseline);

}  // namespace minliq
