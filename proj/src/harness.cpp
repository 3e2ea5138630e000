#include "mcarma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "mcarma/recovery.hpp"
#include "mcarma/rng.hpp"

namespace mcarma::harness {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

// Tags a pipeline failure with the stage it came from.
struct StageError : std::runtime_error {
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error(message), stage(std::move(stage_name)) {}
    std::string stage;
};

template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

Eigen::MatrixXd parse_matrix(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols,
                             const std::string& what) {
    require(j.is_array() && static_cast<Eigen::Index>(j.size()) == rows * cols,
            what + ": expected " + std::to_string(rows * cols) + " row-major entries");
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(k++).get<double>();
    return m;
}

nlohmann::json matrix_row_major(const Eigen::MatrixXd& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

levy::LevySpec levy_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    levy::LevySpec spec;
    if (family == "gamma_subordinator") {
        spec.family = levy::GammaSubordinator{j.at("b").get<double>(), j.at("a").get<double>()};
    } else if (family == "brownian_drift") {
        const auto& drift = j.at("gamma");
        const Eigen::Index m = static_cast<Eigen::Index>(drift.size());
        levy::BrownianDrift fam;
        fam.drift.resize(m);
        for (Eigen::Index k = 0; k < m; ++k) fam.drift[k] = drift.at(k).get<double>();
        fam.cov = parse_matrix(j.at("sigma"), m, m, "levy.sigma");
        spec.family = std::move(fam);
    } else if (family == "compound_poisson") {
        levy::CompoundPoisson fam;
        fam.rate = j.at("rate").get<double>();
        const auto& atoms = j.at("atoms");
        require(atoms.is_array() && !atoms.empty(), "levy.atoms: nonempty array required");
        const Eigen::Index m = static_cast<Eigen::Index>(atoms.at(0).size());
        fam.atoms.resize(m, static_cast<Eigen::Index>(atoms.size()));
        for (size_t c = 0; c < atoms.size(); ++c)
            for (Eigen::Index r = 0; r < m; ++r) fam.atoms(r, static_cast<Eigen::Index>(c)) = atoms.at(c).at(r).get<double>();
        const auto& weights = j.at("weights");
        fam.weights.resize(static_cast<Eigen::Index>(weights.size()));
        for (Eigen::Index k = 0; k < fam.weights.size(); ++k) fam.weights[k] = weights.at(k).get<double>();
        spec.family = std::move(fam);
    } else if (family == "drift_only") {
        const auto& drift = j.at("gamma");
        levy::DriftOnly fam;
        fam.drift.resize(static_cast<Eigen::Index>(drift.size()));
        for (Eigen::Index k = 0; k < fam.drift.size(); ++k) fam.drift[k] = drift.at(k).get<double>();
        spec.family = std::move(fam);
    } else {
        throw std::invalid_argument("levy.family: unknown family '" + family + "'");
    }
    spec.validate();
    return spec;
}

nlohmann::json levy_to_json(const levy::LevySpec& spec) {
    nlohmann::json j;
    std::visit(
        [&](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, levy::GammaSubordinator>) {
                j["family"] = "gamma_subordinator";
                j["b"] = fam.scale_b;
                j["a"] = fam.shape_a;
            } else if constexpr (std::is_same_v<T, levy::BrownianDrift>) {
                j["family"] = "brownian_drift";
                j["gamma"] = std::vector<double>(fam.drift.data(), fam.drift.data() + fam.drift.size());
                j["sigma"] = matrix_row_major(fam.cov);
            } else if constexpr (std::is_same_v<T, levy::CompoundPoisson>) {
                j["family"] = "compound_poisson";
                j["rate"] = fam.rate;
                nlohmann::json atoms = nlohmann::json::array();
                for (Eigen::Index c = 0; c < fam.atoms.cols(); ++c) {
                    nlohmann::json atom = nlohmann::json::array();
                    for (Eigen::Index r = 0; r < fam.atoms.rows(); ++r) atom.push_back(fam.atoms(r, c));
                    atoms.push_back(atom);
                }
                j["atoms"] = atoms;
                j["weights"] =
                    std::vector<double>(fam.weights.data(), fam.weights.data() + fam.weights.size());
            } else {
                j["family"] = "drift_only";
                j["gamma"] = std::vector<double>(fam.drift.data(), fam.drift.data() + fam.drift.size());
            }
        },
        spec.family);
    return j;
}

struct Pipeline {
    carma::StateSpaceRealization ssr;
    levy::IncrementSample truth;
    levy::IncrementSample recovered;
};

int unit_count(const ExperimentConfig& config, double h) {
    // Largest N with N + extra*h <= T on the fine grid.
    const int extra = config.derivative_orders();
    const double budget = config.T - static_cast<double>(extra) * h;
    const int n = static_cast<int>(std::floor(budget + 1e-9));
    require(n >= 1, "experiment: horizon too short for one unit increment plus trailing samples");
    return n;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string increments_csv(const levy::IncrementSample& recovered,
                           const levy::IncrementSample& truth) {
    std::string csv;
    const Eigen::Index m = recovered.dim();
    csv += "n";
    for (Eigen::Index k = 0; k < m; ++k) csv += ",dL_hat_" + std::to_string(k + 1);
    for (Eigen::Index k = 0; k < m; ++k) csv += ",dL_true_" + std::to_string(k + 1);
    csv += "\n";
    for (Eigen::Index n = 0; n < recovered.count(); ++n) {
        csv += std::to_string(n + 1);
        for (Eigen::Index k = 0; k < m; ++k) csv += "," + format_double(recovered.values(k, n));
        for (Eigen::Index k = 0; k < m; ++k) csv += "," + format_double(truth.values(k, n));
        csv += "\n";
    }
    return csv;
}

nlohmann::json result_json(const ExperimentConfig& config, const SingleRunResult& res) {
    nlohmann::json j;
    j["theta"] = vector_to_json(res.estimate.theta);
    j["sigma"] = matrix_to_json(res.estimate.sigma);
    j["criterion"] = res.estimate.criterion;
    j["N"] = res.estimate.n_increments.value_or(static_cast<int>(res.recovered.count()));
    j["h"] = res.estimate.h.value_or(0.0);
    j["dropped"] = res.estimate.diagnostics.dropped;
    j["converged"] = res.estimate.diagnostics.converged;
    j["n_used"] = res.estimate.n_used;
    j["mean_abs_error"] = res.mean_abs_error;
    j["max_abs_error"] = res.max_abs_error;
    j["config"] = config.to_json();
    return j;
}

std::string rows_csv(const std::vector<ReplicationRow>& rows, int r_dim) {
    std::string csv = "h,replication,seed,ok,stage,message";
    for (int k = 0; k < r_dim; ++k) csv += ",theta_" + std::to_string(k + 1);
    csv += ",criterion,converged,dropped,n_used\n";
    for (const auto& row : rows) {
        csv += format_double(row.h);
        csv += "," + std::to_string(row.replication);
        csv += "," + std::to_string(row.seed);
        csv += row.ok ? ",1" : ",0";
        csv += "," + csv_escape(row.stage);
        csv += "," + csv_escape(row.message);
        for (int k = 0; k < r_dim; ++k) {
            csv += ",";
            if (row.ok) csv += format_double(row.theta[k]);
        }
        csv += "," + (row.ok ? format_double(row.criterion) : std::string());
        csv += row.converged ? ",1" : ",0";
        csv += "," + std::to_string(row.dropped);
        csv += "," + std::to_string(row.n_used);
        csv += "\n";
    }
    return csv;
}

nlohmann::json report_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["config"] = report.config_echo;
    nlohmann::json per_h = nlohmann::json::array();
    for (const auto& s : report.per_h) {
        nlohmann::json entry;
        entry["h"] = s.h;
        entry["succeeded"] = s.succeeded;
        entry["failed"] = s.failed;
        entry["mean"] = vector_to_json(s.mean);
        entry["std"] = vector_to_json(s.stddev);
        entry["cov"] = matrix_to_json(s.covariance);
        per_h.push_back(entry);
    }
    j["per_h"] = per_h;
    if (report.sigma_over_n) j["sigma_over_N"] = matrix_to_json(*report.sigma_over_n);
    return j;
}

PerHSummary summarize(double h, const std::vector<ReplicationRow>& rows, int r_dim) {
    PerHSummary s;
    s.h = h;
    s.mean = Eigen::VectorXd::Zero(r_dim);
    std::vector<const ReplicationRow*> ok_rows;
    for (const auto& row : rows) {
        if (row.h != h) continue;
        if (row.ok) {
            ok_rows.push_back(&row);
        } else {
            ++s.failed;
        }
    }
    s.succeeded = static_cast<int>(ok_rows.size());
    s.stddev = Eigen::VectorXd::Zero(r_dim);
    s.covariance = Eigen::MatrixXd::Zero(r_dim, r_dim);
    if (ok_rows.empty()) return s;
    for (const auto* row : ok_rows) s.mean += row->theta;
    s.mean /= static_cast<double>(ok_rows.size());
    if (ok_rows.size() > 1) {
        for (const auto* row : ok_rows) {
            const Eigen::VectorXd c = row->theta - s.mean;
            s.covariance += c * c.transpose();
        }
        s.covariance /= static_cast<double>(ok_rows.size() - 1);
    }
    s.stddev = s.covariance.diagonal().cwiseSqrt();
    return s;
}

ExperimentReport run_replicated(const ExperimentConfig& config, int threads, bool emit_files,
                                bool clt_mode) {
    config.validate();
    if (clt_mode) {
        require(config.h_list.size() == 1, "experiment clt: exactly one h required");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const int r_dim = config.estimator.moment_function().r_dim;

    struct Task {
        double h = 0.0;
        int replication = 0;
    };
    std::vector<Task> tasks;
    for (double h : config.h_list)
        for (int rep = 0; rep < config.replications; ++rep) tasks.push_back({h, rep});

    std::vector<ReplicationRow> rows(tasks.size());
    std::atomic<size_t> next{0};
    const int workers = std::max(1, threads);
    auto work = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) break;
            const Task& task = tasks[idx];
            ReplicationRow row;
            row.h = task.h;
            row.replication = task.replication;
            row.seed = replication_seed(config.seed, task.h, task.replication);
            try {
                const SingleRunResult res = run_single(config, task.h, row.seed);
                row.ok = true;
                row.theta = res.estimate.theta;
                row.criterion = res.estimate.criterion;
                row.converged = res.estimate.diagnostics.converged;
                row.dropped = res.estimate.diagnostics.dropped;
                row.n_used = res.estimate.n_used;
            } catch (const StageError& e) {
                row.ok = false;
                row.stage = e.stage;
                row.message = e.what();
            } catch (const std::exception& e) {
                row.ok = false;
                row.stage = "setup";
                row.message = e.what();
            }
            rows[idx] = std::move(row);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    size_t failures = 0;
    for (const auto& row : rows) {
        if (!row.ok) ++failures;
    }
    if (failures * 20 > tasks.size()) {  // more than 5%
        throw std::runtime_error("experiment: " + std::to_string(failures) + " of " +
                                 std::to_string(tasks.size()) + " replications failed");
    }

    ExperimentReport report;
    report.config_echo = config.to_json();
    report.rows = rows;
    for (double h : config.h_list) report.per_h.push_back(summarize(h, rows, r_dim));

    if (clt_mode) {
        const int n_units = unit_count(config, config.h_list.front());
        Eigen::MatrixXd g0, omega0;
        if (config.estimator.kind == EstimatorSpec::Kind::GammaMle) {
            const auto* gamma = std::get_if<levy::GammaSubordinator>(&config.levy_spec.family);
            require(gamma != nullptr, "experiment clt: gamma_mle estimator needs a gamma driver");
            g0 = gmm::gamma_fisher_information(gamma->scale_b, gamma->shape_a);
            omega0 = g0;
        } else {
            const auto* gamma = std::get_if<levy::GammaSubordinator>(&config.levy_spec.family);
            require(gamma != nullptr, "experiment clt: cf estimator needs a gamma driver");
            std::vector<Eigen::VectorXd> probes;
            for (double u : config.estimator.u_points)
                probes.push_back(Eigen::VectorXd::Constant(1, u));
            gmm::CharExponent psi = [](const Eigen::VectorXd& u, const Eigen::VectorXd& theta) {
                return levy::gamma_char_exponent(u[0], theta[0], theta[1]);
            };
            gmm::CharExponentGradient dpsi = [](const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& theta) -> Eigen::VectorXcd {
                const std::complex<double> denom(1.0, -theta[0] * u[0]);
                Eigen::VectorXcd grad(2);
                grad[0] = std::complex<double>(0.0, theta[1] * u[0]) / denom;
                grad[1] = -std::log(denom);
                return grad;
            };
            Eigen::VectorXd theta_true(2);
            theta_true << gamma->scale_b, gamma->shape_a;
            gmm::cf_population_moments(probes, psi, dpsi, theta_true, g0, omega0);
        }
        const Eigen::MatrixXd opt_w = omega0.inverse();
        report.sigma_over_n =
            gmm::asymptotic_covariance(g0, omega0, opt_w) / static_cast<double>(n_units);
    }

    if (emit_files) {
        const std::filesystem::path dir(config.output_dir);
        std::filesystem::create_directories(dir);
        write_text_file(dir / "replications.csv", rows_csv(rows, r_dim));
        write_text_file(dir / "report.json", report_json(report).dump(2) + "\n");
    }
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace

double anderson_darling_normal(std::vector<double> sample) {
    const size_t n = sample.size();
    if (n < 8) throw std::invalid_argument("anderson_darling: need at least 8 observations");
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : sample) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    if (var <= 0.0) throw std::invalid_argument("anderson_darling: sample has zero variance");

    std::sort(sample.begin(), sample.end());
    const double sd = std::sqrt(var);
    auto phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };

    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double lo = phi((sample[i] - mean) / sd);
        double hi = phi((sample[n - 1 - i] - mean) / sd);
        lo = std::min(std::max(lo, 1e-300), 1.0 - 1e-16);
        hi = std::min(std::max(hi, 1e-300), 1.0 - 1e-16);
        acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log1p(-hi));
    }
    const double a2 = -static_cast<double>(n) - acc / static_cast<double>(n);
    // Adjustment for estimated parameters.
    return a2 * (1.0 + 0.75 / static_cast<double>(n) + 2.25 / static_cast<double>(n * n));
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
    return out;
}

gmm::MomentFunction EstimatorSpec::moment_function() const {
    if (kind == Kind::GammaMle) return gmm::gamma_mle_moment_function();
    return gmm::gamma_cf_moment_function(u_points);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig config;
    const auto& jm = j.at("model");
    const int p = jm.at("p").get<int>();
    const int q = jm.at("q").get<int>();
    const Eigen::Index m = jm.at("m").get<Eigen::Index>();
    const Eigen::Index d = jm.at("d").get<Eigen::Index>();
    const auto& ja = jm.at("A");
    const auto& jb = jm.at("B");
    require(static_cast<int>(ja.size()) == p, "model.A: expected p coefficient matrices");
    require(static_cast<int>(jb.size()) == q + 1, "model.B: expected q+1 coefficient matrices");
    std::vector<Eigen::MatrixXd> ar, ma;
    for (int k = 0; k < p; ++k) ar.push_back(parse_matrix(ja.at(k), m, m, "model.A"));
    for (int k = 0; k <= q; ++k) ma.push_back(parse_matrix(jb.at(k), d, m, "model.B"));
    config.model = carma::CarmaModel::create(p, q, m, d, std::move(ar), std::move(ma));

    config.levy_spec = levy_from_json(j.at("levy"));
    config.T = j.at("T").get<double>();
    config.euler_dt = j.value("euler_dt", 5e-4);
    config.warmup = j.value("warmup", 0.0);
    for (const auto& h : j.at("h_list")) config.h_list.push_back(h.get<double>());
    config.replications = j.value("replications", 1);
    config.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("estimator")) {
        const auto& je = j.at("estimator");
        const std::string type = je.at("type").get<std::string>();
        if (type == "gamma_mle") {
            config.estimator.kind = EstimatorSpec::Kind::GammaMle;
        } else if (type == "cf") {
            config.estimator.kind = EstimatorSpec::Kind::CharacteristicFunction;
            if (je.contains("u_points")) {
                config.estimator.u_points.clear();
                for (const auto& u : je.at("u_points"))
                    config.estimator.u_points.push_back(u.get<double>());
            }
        } else {
            throw std::invalid_argument("estimator.type: unknown type '" + type + "'");
        }
    }
    config.output_dir = j.value("output_dir", std::string("."));
    config.validate();
    return config;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    nlohmann::json jm;
    jm["p"] = model.p;
    jm["q"] = model.q;
    jm["m"] = model.m;
    jm["d"] = model.d;
    nlohmann::json ja = nlohmann::json::array();
    for (const auto& a : model.ar) ja.push_back(matrix_row_major(a));
    nlohmann::json jb = nlohmann::json::array();
    for (const auto& b : model.ma) jb.push_back(matrix_row_major(b));
    jm["A"] = ja;
    jm["B"] = jb;
    j["model"] = jm;
    j["levy"] = levy_to_json(levy_spec);
    j["T"] = T;
    j["euler_dt"] = euler_dt;
    if (warmup != 0.0) j["warmup"] = warmup;
    j["h_list"] = h_list;
    j["replications"] = replications;
    j["seed"] = seed;
    nlohmann::json je;
    je["type"] =
        estimator.kind == EstimatorSpec::Kind::GammaMle ? "gamma_mle" : "cf";
    if (estimator.kind == EstimatorSpec::Kind::CharacteristicFunction)
        je["u_points"] = estimator.u_points;
    j["estimator"] = je;
    j["output_dir"] = output_dir;
    return j;
}

void ExperimentConfig::validate() const {
    require(T > 0.0 && euler_dt > 0.0, "config: T and euler_dt must be positive");
    const double steps = T / euler_dt;
    require(std::abs(steps - std::round(steps)) < 1e-9 * std::max(1.0, steps),
            "config: T/euler_dt must be an integer");
    require(!h_list.empty(), "config: h_list must not be empty");
    for (double h : h_list) {
        require(h > 0.0 && h <= 1.0, "config: each h must lie in (0, 1]");
        const double k = 1.0 / h;
        require(std::abs(k - std::round(k)) < 1e-9, "config: 1/h must be an integer");
        const double ratio = h / euler_dt;
        require(std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio),
                "config: each h must be a multiple of euler_dt");
    }
    require(replications >= 1, "config: replications must be >= 1");
    require(levy_spec.dimension() == model.m, "config: driver dimension must match the model");
    if (estimator.kind == EstimatorSpec::Kind::CharacteristicFunction ||
        estimator.kind == EstimatorSpec::Kind::GammaMle) {
        require(model.m == 1, "config: the provided estimators are one-dimensional");
    }
}

std::uint64_t replication_seed(std::uint64_t master, double h, int replication) {
    return rng::derive_seed(master, rng::double_bits(h),
                            static_cast<std::uint64_t>(replication) + 1);
}

SingleRunResult run_single(const ExperimentConfig& config, double h, std::uint64_t seed,
                           const std::filesystem::path& out_dir) {
    config.validate();
    const int n_units = unit_count(config, h);
    const int extra = config.derivative_orders();

    rng::Stream stream(seed);
    const auto ssr = carma::build_state_space(config.model);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(config.model.p * config.model.m);
    const carma::FinePath path = staged("simulate", [&] {
        return carma::simulate(config.model, ssr, config.levy_spec, config.T, config.euler_dt, x0,
                               stream, config.warmup);
    });
    const carma::SampledSeries series =
        staged("sample", [&] { return carma::sample(path, h, n_units, extra); });

    recovery::RecoveryConfig rc;
    const recovery::RecoveryOutput rec =
        staged("recover", [&] { return recover_increments(ssr, series, rc); });

    SingleRunResult res;
    res.recovered = rec.increments;
    res.truth = carma::true_unit_increments(path, n_units);

    double acc = 0.0;
    double worst = 0.0;
    for (Eigen::Index n = 0; n < res.recovered.count(); ++n) {
        const double err = (res.recovered.values.col(n) - res.truth.values.col(n)).norm();
        acc += err;
        worst = std::max(worst, err);
    }
    res.mean_abs_error = acc / static_cast<double>(res.recovered.count());
    res.max_abs_error = worst;

    gmm::OptimizerConfig opt;
    res.estimate = staged("estimate", [&] {
        return gmm::two_stage_estimate(rec.increments, config.estimator.moment_function(), opt);
    });
    res.estimate.n_increments = n_units;
    res.estimate.h = h;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text_file(out_dir / "increments.csv", increments_csv(res.recovered, res.truth));
        write_text_file(out_dir / "result.json", result_json(config, res).dump(2) + "\n");
    }
    return res;
}

ExperimentReport run_consistency(const ExperimentConfig& config, int threads, bool emit_files) {
    return run_replicated(config, threads, emit_files, /*clt_mode=*/false);
}

ExperimentReport run_clt(const ExperimentConfig& config, int threads, bool emit_files) {
    return run_replicated(config, threads, emit_files, /*clt_mode=*/true);
}

}  // namespace mcarma::harness
