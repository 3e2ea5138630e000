#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcarma/carma.hpp"
#include "mcarma/gmm.hpp"
#include "mcarma/levy.hpp"

namespace mcarma::harness {

struct EstimatorSpec {
    enum class Kind { GammaMle, CharacteristicFunction };
    Kind kind = Kind::GammaMle;
    std::vector<double> u_points = {0.5, 1.0};  // CF probes for m = 1

    gmm::MomentFunction moment_function() const;
};

/// Experiment description; parsed from and echoed back as JSON.
struct ExperimentConfig {
    carma::CarmaModel model;
    levy::LevySpec levy_spec;
    double T = 0.0;
    double euler_dt = 5e-4;
    double warmup = 0.0;
    std::vector<double> h_list;
    int replications = 1;
    std::uint64_t seed = 0;
    EstimatorSpec estimator;
    std::string output_dir = ".";

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
    int derivative_orders() const { return model.p - model.q - 1; }
};

/// Per-replication outcome; failures are data, not aborts.
struct ReplicationRow {
    double h = 0.0;
    int replication = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string stage;    // failing pipeline stage when !ok
    std::string message;  // error text when !ok
    Eigen::VectorXd theta;
    double criterion = 0.0;
    bool converged = false;
    long dropped = 0;
    long n_used = 0;
};

struct PerHSummary {
    double h = 0.0;
    int succeeded = 0;
    int failed = 0;
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
    Eigen::MatrixXd covariance;
};

struct ExperimentReport {
    nlohmann::json config_echo;
    std::vector<PerHSummary> per_h;
    std::vector<ReplicationRow> rows;
    // CLT comparison: theoretical covariance of the estimator at the
    // generating parameter, scaled by the number of unit increments.
    std::optional<Eigen::MatrixXd> sigma_over_n;
    double elapsed_seconds = 0.0;  // console-only; never written to artifacts
};

struct SingleRunResult {
    gmm::GmmResult estimate;
    levy::IncrementSample recovered;
    levy::IncrementSample truth;
    double mean_abs_error = 0.0;
    double max_abs_error = 0.0;
};

/// Derived seed for one (h, replication) cell.  Keyed by the value of h so
/// that reordering h_list leaves every cell's stream unchanged.
std::uint64_t replication_seed(std::uint64_t master, double h, int replication);

/// Simulate -> sample -> recover -> estimate for a single h.  Emits
/// increments.csv (with ground truth) and result.json into out_dir when it
/// is nonempty.  Fully deterministic given the seed.
SingleRunResult run_single(const ExperimentConfig& config, double h, std::uint64_t seed,
                           const std::filesystem::path& out_dir = {});

/// Replicated sweep over h_list; emits replications.csv and report.json
/// into the config output directory when emit_files is true.
ExperimentReport run_consistency(const ExperimentConfig& config, int threads,
                                 bool emit_files = true);

/// Replicated run at a single h with the theoretical covariance attached;
/// emits replications.csv and report.json when emit_files is true.
ExperimentReport run_clt(const ExperimentConfig& config, int threads, bool emit_files = true);

/// Anderson-Darling statistic A*^2 for normality with estimated mean and
/// variance (small-sample adjusted).  Values above 1.035 reject at the 1%
/// level.
double anderson_darling_normal(std::vector<double> sample);

/// Shortest round-trip decimal rendering of a double (deterministic).
std::string format_double(double x);

/// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

}  // namespace mcarma::harness
