#include "vmpo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vmpo {

namespace {

using nlohmann::json;

void require_same_dims(const ComplexMatrix& target, const ComplexMatrix& seq,
                       const char* what) {
    if (target.rows() != seq.rows() || target.cols() != seq.cols()) {
        throw std::invalid_argument(std::string(what) +
                                    ": target and sequence dimensions differ");
    }
    if (target.size() == 0) {
        throw std::invalid_argument(std::string(what) + ": empty matrices");
    }
    if (!target.allFinite() || !seq.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

}  // namespace

double frobenius_cost(const ComplexMatrix& target, const ComplexMatrix& seq) {
    require_same_dims(target, seq, "frobenius_cost");
    return (target - seq).squaredNorm();
}

double gap_frobenius(double cost, const ComplexMatrix& target,
                     const ComplexMatrix& seq) {
    require_same_dims(target, seq, "gap_frobenius");
    if (!(cost >= 0.0)) {
        throw std::invalid_argument("gap_frobenius: cost must be non-negative");
    }
    const double denom = target.squaredNorm() + seq.squaredNorm();
    if (denom <= 0.0) {
        throw std::invalid_argument("gap_frobenius: zero denominator");
    }
    return cost / denom;
}

double gap_pnorm(const ComplexMatrix& target, const ComplexMatrix& seq) {
    require_same_dims(target, seq, "gap_pnorm");
    const double t = spectral_norm(target);
    const double s = spectral_norm(seq);
    const double denom = (t + s) * (t + s);
    if (denom <= 0.0) {
        throw std::invalid_argument("gap_pnorm: degenerate normalization");
    }
    const double diff = spectral_norm(target - seq);
    return diff * diff / denom;
}

double gap_frobenius_renormalized(double cost, const ComplexMatrix& target,
                                  const ComplexMatrix& seq) {
    require_same_dims(target, seq, "gap_frobenius_renormalized");
    if (!(cost >= 0.0)) {
        throw std::invalid_argument(
            "gap_frobenius_renormalized: cost must be non-negative");
    }
    const double t = target.norm();
    const double s = seq.norm();
    const double denom = (t + s) * (t + s);
    if (denom <= 0.0) {
        throw std::invalid_argument(
            "gap_frobenius_renormalized: zero denominator");
    }
    return cost / denom;
}

RestartStats restart_stats_from_costs(const std::vector<double>& costs,
                                      double gap_denominator) {
    if (!(gap_denominator > 0.0)) {
        throw std::invalid_argument("restart_stats: denominator must be positive");
    }
    RestartStats stats;
    double sum = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (double c : costs) {
        if (std::isnan(c)) continue;  // aborted restart
        const double gap = c / gap_denominator;
        sum += gap;
        best = std::min(best, gap);
        ++stats.count;
    }
    if (stats.count == 0) {
        throw std::invalid_argument("restart_stats: no completed restarts");
    }
    stats.best = best;
    stats.mean = sum / stats.count;
    double var = 0.0;
    for (double c : costs) {
        if (std::isnan(c)) continue;
        const double gap = c / gap_denominator;
        var += (gap - stats.mean) * (gap - stats.mean);
    }
    stats.stddev = std::sqrt(var / stats.count);
    return stats;
}

GapReport make_gap_report(const std::string& experiment, const std::string& gate,
                          const SystemShape& shape, Metric metric,
                          const ComplexMatrix& target, const ComplexMatrix& seq,
                          const OptimizeResult& result,
                          const std::string& config_digest) {
    require_same_dims(target, seq, "make_gap_report");

    GapReport report;
    report.experiment = experiment;
    report.gate = gate;
    report.shape = shape;
    report.metric = metric_name(metric);
    report.config_digest = config_digest;

    report.target_norm_f_sq = target.squaredNorm();
    report.seq_norm_f_sq = seq.squaredNorm();
    report.cost_frobenius = frobenius_cost(target, seq);
    report.gap_frobenius =
        vmpo::gap_frobenius(report.cost_frobenius, target, seq);
    report.gap_frobenius_renorm =
        gap_frobenius_renormalized(report.cost_frobenius, target, seq);

    if (metric == Metric::pnorm2) {
        const double t = spectral_norm(target);
        const double s = spectral_norm(seq);
        const double denom = (t + s) * (t + s);
        report.restarts = restart_stats_from_costs(result.restart_costs, denom);
        const double diff = spectral_norm(target - seq);
        report.cost_pnorm = diff * diff;
        // Tabulated convention: the headline p-norm gap is the mean over
        // restarts; the best restart remains available in the stats.
        report.gap_pnorm = report.restarts.mean;
    } else {
        report.restarts = restart_stats_from_costs(
            result.restart_costs,
            report.target_norm_f_sq + report.seq_norm_f_sq);
    }

    report.converged = result.trace.converged;
    report.sweeps_used = result.trace.sweeps_used;
    return report;
}

std::string config_digest(const OptimizerConfig& cfg) {
    std::ostringstream canon;
    canon.precision(17);
    canon << metric_name(cfg.metric) << '|' << cfg.max_sweeps << '|' << cfg.rel_tol
          << '|' << cfg.restarts << '|'
          << (cfg.init_mode == InitMode::identity ? "identity" : "haar_random") << '|'
          << cfg.seed << '|' << cfg.pnorm_step << '|' << cfg.pnorm_max_iters_per_site;
    const std::string text = canon.str();
    std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    std::ostringstream hex;
    hex << std::hex << hash;
    return hex.str();
}

namespace {

json report_to_json(const GapReport& r) {
    json j;
    j["experiment"] = r.experiment;
    j["gate"] = r.gate;
    j["shape"] = {{"n_qubits", r.shape.n_qubits},
                  {"ancilla_dim", r.shape.ancilla_dim},
                  {"input_qubits", r.shape.input_qubits}};
    j["metric"] = r.metric;
    j["cost_frobenius"] = r.cost_frobenius;
    j["gap_frobenius"] = r.gap_frobenius;
    j["gap_frobenius_renorm"] = r.gap_frobenius_renorm;
    if (r.cost_pnorm) j["cost_pnorm"] = *r.cost_pnorm;
    if (r.gap_pnorm) j["gap_pnorm"] = *r.gap_pnorm;
    j["target_norm_f_sq"] = r.target_norm_f_sq;
    j["seq_norm_f_sq"] = r.seq_norm_f_sq;
    j["restarts"] = {{"best", r.restarts.best},
                     {"mean", r.restarts.mean},
                     {"stddev", r.restarts.stddev},
                     {"count", r.restarts.count}};
    j["converged"] = r.converged;
    j["sweeps_used"] = r.sweeps_used;
    j["config_digest"] = r.config_digest;
    return j;
}

GapReport report_from_json(const json& j) {
    GapReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.gate = j.at("gate").get<std::string>();
    const json& shape = j.at("shape");
    r.shape.n_qubits = shape.at("n_qubits").get<int>();
    r.shape.ancilla_dim = shape.at("ancilla_dim").get<int>();
    r.shape.input_qubits = shape.at("input_qubits").get<int>();
    r.metric = j.at("metric").get<std::string>();
    r.cost_frobenius = j.at("cost_frobenius").get<double>();
    r.gap_frobenius = j.at("gap_frobenius").get<double>();
    r.gap_frobenius_renorm = j.at("gap_frobenius_renorm").get<double>();
    if (j.contains("cost_pnorm")) r.cost_pnorm = j.at("cost_pnorm").get<double>();
    if (j.contains("gap_pnorm")) r.gap_pnorm = j.at("gap_pnorm").get<double>();
    r.target_norm_f_sq = j.at("target_norm_f_sq").get<double>();
    r.seq_norm_f_sq = j.at("seq_norm_f_sq").get<double>();
    const json& stats = j.at("restarts");
    r.restarts.best = stats.at("best").get<double>();
    r.restarts.mean = stats.at("mean").get<double>();
    r.restarts.stddev = stats.at("stddev").get<double>();
    r.restarts.count = stats.at("count").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.sweeps_used = j.at("sweeps_used").get<int>();
    r.config_digest = j.at("config_digest").get<std::string>();
    return r;
}

}  // namespace

std::string gap_report_to_json_string(const GapReport& report) {
    return report_to_json(report).dump(2);
}

GapReport gap_report_from_json_string(const std::string& text) {
    try {
        return report_from_json(json::parse(text));
    } catch (const json::exception& err) {
        // Covers parse errors as well as missing or mistyped fields.
        throw std::invalid_argument(std::string("report json: ") + err.what());
    }
}

std::string gap_report_csv_header() {
    return "experiment,gate,n_qubits,ancilla_dim,input_qubits,metric,"
           "cost_frobenius,gap_frobenius,gap_frobenius_renorm,cost_pnorm,gap_pnorm,"
           "target_norm_f_sq,seq_norm_f_sq,restart_best,restart_mean,restart_stddev,"
           "restart_count,converged,sweeps_used,config_digest";
}

std::string gap_report_csv_row(const GapReport& r) {
    std::ostringstream row;
    row << r.experiment << ',' << r.gate << ',' << r.shape.n_qubits << ','
        << r.shape.ancilla_dim << ',' << r.shape.input_qubits << ',' << r.metric << ','
        << format_double(r.cost_frobenius) << ',' << format_double(r.gap_frobenius)
        << ',' << format_double(r.gap_frobenius_renorm) << ','
        << (r.cost_pnorm ? format_double(*r.cost_pnorm) : std::string{}) << ','
        << (r.gap_pnorm ? format_double(*r.gap_pnorm) : std::string{}) << ','
        << format_double(r.target_norm_f_sq) << ',' << format_double(r.seq_norm_f_sq)
        << ',' << format_double(r.restarts.best) << ','
        << format_double(r.restarts.mean) << ',' << format_double(r.restarts.stddev)
        << ',' << r.restarts.count << ',' << (r.converged ? "true" : "false") << ','
        << r.sweeps_used << ',' << r.config_digest;
    return row.str();
}

}  // namespace vmpo
