#include "macesim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "macesim/estimators.hpp"
#include "macesim/geometry.hpp"
#include "macesim/pilot.hpp"
#include "macesim/tracker.hpp"

namespace macesim {

namespace {

constexpr std::array<Scheme, 3> kSchemes = {Scheme::local, Scheme::central, Scheme::mace};

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

bool is_int_param(const std::string& p) {
    return p == "tau_p" || p == "N" || p == "L" || p == "K";
}

void apply_sweep_value(SimConfig& cfg, const std::string& param, double value) {
    if (is_int_param(param)) {
        const double r = std::round(value);
        if (std::abs(value - r) > 1e-9)
            throw std::invalid_argument("sweep value for " + param + " must be an integer");
        const int iv = int(r);
        if (param == "tau_p") cfg.tau_p = iv;
        else if (param == "N") cfg.N = iv;
        else if (param == "L") cfg.L = iv;
        else cfg.K = iv;
    } else if (param == "eta") {
        cfg.eta = value;
    } else {
        throw std::invalid_argument("unknown sweep parameter '" + param + "'");
    }
}

struct UeAccumulators {
    NmseAccumulator acc[3];
    double theory_const[3] = {0.0, 0.0, 0.0};  // local/central closed forms
    double theory_mace_sum = 0.0;
    long theory_mace_count = 0;
};

}  // namespace

StatsSource stats_source_from_string(const std::string& name) {
    if (name == "true") return StatsSource::true_stats;
    if (name == "tracked") return StatsSource::tracked;
    throw std::invalid_argument("stats source must be 'true' or 'tracked', got '" + name + "'");
}

const char* to_string(StatsSource s) {
    return s == StatsSource::true_stats ? "true" : "tracked";
}

void ExperimentSpec::validate() const {
    base.validate();
    if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
    SimConfig probe = base;
    for (double v : sweep_values) {
        apply_sweep_value(probe, sweep_param, v);
        probe.validate();
    }
}

RealizationResult run_realization(const SimConfig& cfg, StatsSource source,
                                  RngStream realization_root, const std::string& dump_prefix) {
    cfg.validate();
    const int L = cfg.L, K = cfg.K, N = cfg.N;

    RngStream layout_rng = realization_root.derive(rng_tag::kTagLayout);
    const Positions positions = place_network(cfg, layout_rng);
    RngStream stats_rng = realization_root.derive(rng_tag::kTagStats);
    const NetworkStats stats = build_stats(positions, cfg, stats_rng);
    const PilotBook book = make_pilot_book(cfg.tau_p);

    std::vector<int> master(K);
    std::vector<CollectiveStats> coll(K);
    std::vector<UeAccumulators> ue(K);
    for (int k = 0; k < K; ++k) {
        master[k] = assign_master(stats, k);
        coll[k] = collective(stats, k);
        const double norm = stats.correlation(master[k], k).real().trace();
        for (int s = 0; s < 3; ++s) {
            ue[k].acc[s].scheme = kSchemes[s];
            ue[k].acc[s].norm = norm;
        }
    }

    // True-statistics caches: the despread covariances are constant across
    // blocks, so factor them once.
    std::vector<MatrixXcd> q_tk_local(size_t(L) * K);
    std::vector<std::optional<HermitianSolver>> solver_local(size_t(L) * K);
    std::vector<MatrixXcd> q_tk_central(K);
    std::vector<std::optional<HermitianSolver>> solver_central(K);

    // Tracked state.
    std::vector<TrackedStats> local_tracker(L);
    TrackedStats central_tracker;
    std::vector<TrackedStats> master_tracker(K);

    if (source == StatsSource::true_stats) {
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k) {
                const size_t idx = size_t(j) * K + k;
                q_tk_local[idx] = true_q_tk_local(stats, cfg, j, k);
                if (stats.link(j, k).rbreve.norm() > 0.0)
                    solver_local[idx].emplace(q_tk_local[idx],
                                              "local AP " + std::to_string(j) + " UE " +
                                                  std::to_string(k));
            }
        for (int k = 0; k < K; ++k) {
            q_tk_central[k] = true_q_tk_central(stats, cfg, k);
            if (coll[k].rbreve.norm() > 0.0)
                solver_central[k].emplace(q_tk_central[k], "central UE " + std::to_string(k));
        }
        for (int k = 0; k < K; ++k) {
            const int l = master[k];
            const auto& link = stats.link(l, k);
            const MatrixXcd r_local = stats.correlation(l, k);
            ue[k].theory_const[0] = theoretical_nmse(link.rbreve, r_local,
                                                     q_tk_local[size_t(l) * K + k], cfg.p,
                                                     cfg.tau_p, 0, N);
            ue[k].theory_const[1] = theoretical_nmse(coll[k].rbreve, coll[k].r,
                                                     q_tk_central[k], cfg.p, cfg.tau_p, l * N,
                                                     N);
        }
    } else {
        for (int j = 0; j < L; ++j) local_tracker[j].init(N, K, cfg);
        central_tracker.init(L * N, K, cfg);
        for (int k = 0; k < K; ++k) master_tracker[k].init(N + L - 1, 1, cfg);
        // Closed-form columns are still reported from the true statistics.
        for (int k = 0; k < K; ++k) {
            const int l = master[k];
            const auto& link = stats.link(l, k);
            const MatrixXcd q_loc = true_q_tk_local(stats, cfg, l, k);
            const MatrixXcd q_cen = true_q_tk_central(stats, cfg, k);
            ue[k].theory_const[0] = theoretical_nmse(link.rbreve, stats.correlation(l, k),
                                                     q_loc, cfg.p, cfg.tau_p, 0, N);
            ue[k].theory_const[1] =
                theoretical_nmse(coll[k].rbreve, coll[k].r, q_cen, cfg.p, cfg.tau_p, l * N, N);
        }
    }

    const double root_pk = std::sqrt(cfg.p * double(cfg.tau_p));
    const int total_blocks = cfg.warmup + cfg.blocks;

    std::vector<VectorXcd> y_loc(size_t(L) * K);       // per-(AP, UE) despreads
    std::vector<VectorXcd> local_est(size_t(L) * K);   // per-(AP, UE) local estimates
    std::vector<VectorXcd> y_ap(L);                    // scratch for fusion

    for (int b = 0; b < total_blocks; ++b) {
        RngStream block_root = realization_root.substream(rng_tag::kTagBlock, uint64_t(b));
        RngStream asg_rng = block_root.derive(rng_tag::kTagAssignment);
        RngStream chan_rng = block_root.derive(rng_tag::kTagChannels);
        RngStream noise_rng = block_root.derive(rng_tag::kTagNoise);

        const PilotAssignment assignment = draw_assignment(K, cfg.tau_p, asg_rng);
        const ChannelRealization channels = sample_channels(stats, chan_rng);
        const PilotBlock block = synthesize_received(channels, assignment, book, cfg, noise_rng);

        const std::string block_ctx = " block " + std::to_string(b);

        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k)
                y_loc[size_t(j) * K + k] = despread_local(block.Y[j], k, assignment, book).y;

        // Local estimation at every AP (the master pairs feed the local
        // scheme, the rest serve as MACE fusion vectors).
        if (source == StatsSource::true_stats) {
            for (int j = 0; j < L; ++j)
                for (int k = 0; k < K; ++k) {
                    const size_t idx = size_t(j) * K + k;
                    const auto& link = stats.link(j, k);
                    if (!solver_local[idx]) {
                        local_est[idx] = link.hbar;
                        continue;
                    }
                    const VectorXcd innovation = y_loc[idx] - root_pk * link.hbar;
                    local_est[idx] =
                        link.hbar + root_pk * (link.rbreve * solver_local[idx]->solve(innovation));
                }
        } else {
            for (int j = 0; j < L; ++j) {
                local_tracker[j].update_received(block.Y[j], cfg.eta);
                for (int k = 0; k < K; ++k)
                    local_tracker[j].update_despread(k, y_loc[size_t(j) * K + k], cfg.eta, cfg);
            }
            for (int j = 0; j < L; ++j)
                for (int k = 0; k < K; ++k) {
                    const size_t idx = size_t(j) * K + k;
                    const double power_cap = double(N) * stats.link(j, k).beta;
                    LmmseInputs in;
                    in.hbar = cap_norm(local_tracker[j].hbar_hat[k].mean(cfg.p, cfg.tau_p),
                                       power_cap);
                    in.rbreve = recover_rbreve(local_tracker[j].Qhat_tk[k], local_tracker[j].Qhat,
                                               in.hbar, cfg.p, cfg.tau_p);
                    in.rbreve = cap_trace(in.rbreve, power_cap);
                    in.rbreve =
                        consistent_rbreve(in.rbreve, local_tracker[j].Qhat_tk[k], cfg.p, cfg.tau_p);
                    in.q_tk = local_tracker[j].Qhat_tk[k];
                    in.y = y_loc[idx];
                    in.p_k = cfg.p;
                    in.tau_p = cfg.tau_p;
                    local_est[idx] = lmmse(in, "tracked local AP " + std::to_string(j) + " UE " +
                                                   std::to_string(k) + block_ctx);
                }
        }

        // Centralized estimation.
        std::vector<VectorXcd> central_est(K);
        if (source == StatsSource::tracked) {
            MatrixXcd y_stacked(size_t(L) * N, cfg.tau_p);
            for (int j = 0; j < L; ++j) y_stacked.middleRows(size_t(j) * N, N) = block.Y[j];
            central_tracker.update_received(y_stacked, cfg.eta);
        }
        for (int k = 0; k < K; ++k) {
            VectorXcd y_cen(size_t(L) * N);
            for (int j = 0; j < L; ++j)
                y_cen.segment(size_t(j) * N, N) = y_loc[size_t(j) * K + k];
            if (source == StatsSource::true_stats) {
                if (!solver_central[k]) {
                    central_est[k] = coll[k].hbar;
                } else {
                    const VectorXcd innovation = y_cen - root_pk * coll[k].hbar;
                    central_est[k] = coll[k].hbar +
                                     root_pk * (coll[k].rbreve *
                                                solver_central[k]->solve(innovation));
                }
            } else {
                central_tracker.update_despread(k, y_cen, cfg.eta, cfg);
                double power_cap = 0.0;
                for (int j = 0; j < L; ++j) power_cap += double(N) * stats.link(j, k).beta;
                LmmseInputs in;
                in.hbar =
                    cap_norm(central_tracker.hbar_hat[k].mean(cfg.p, cfg.tau_p), power_cap);
                in.rbreve = recover_rbreve(central_tracker.Qhat_tk[k], central_tracker.Qhat,
                                           in.hbar, cfg.p, cfg.tau_p);
                in.rbreve = cap_trace(in.rbreve, power_cap);
                in.rbreve =
                    consistent_rbreve(in.rbreve, central_tracker.Qhat_tk[k], cfg.p, cfg.tau_p);
                in.q_tk = central_tracker.Qhat_tk[k];
                in.y = y_cen;
                in.p_k = cfg.p;
                in.tau_p = cfg.tau_p;
                central_est[k] =
                    lmmse(in, "tracked central UE " + std::to_string(k) + block_ctx);
            }
        }

        // MACE: fuse the per-AP local estimates of this block, then estimate
        // at the master.
        const bool accumulate_block = b >= cfg.warmup;
        for (int k = 0; k < K; ++k) {
            const int l = master[k];
            std::vector<VectorXcd> v(L);
            for (int j = 0; j < L; ++j) {
                v[j] = local_est[size_t(j) * K + k];
                y_ap[j] = y_loc[size_t(j) * K + k];
            }
            const FusionSet fusion = build_fusion(v, l, cfg.normalize_fusion);
            const VectorXcd y_fused = fuse_despread(fusion, y_ap);

            VectorXcd mace_est;
            if (source == StatsSource::true_stats) {
                LmmseInputs in;
                in.hbar = fused_mean(fusion, stats, k);
                in.rbreve = fused_rbreve(fusion, stats, k);
                in.q_tk = fused_true_q_tk(stats, cfg, fusion, k);
                in.y = y_fused;
                in.p_k = cfg.p;
                in.tau_p = cfg.tau_p;
                const VectorXcd z_est = lmmse(in, "mace UE " + std::to_string(k) + block_ctx);
                mace_est = z_est.segment(fusion.master_offset(), N);
                if (accumulate_block) {
                    const MatrixXcd r_fused = in.hbar * in.hbar.adjoint() + in.rbreve;
                    ue[k].theory_mace_sum +=
                        theoretical_nmse(in.rbreve, r_fused, in.q_tk, cfg.p, cfg.tau_p,
                                         fusion.master_offset(), N);
                    ++ue[k].theory_mace_count;
                }
            } else {
                const MatrixXcd y_tilde = fuse_received(fusion, block.Y);
                master_tracker[k].update_received(y_tilde, cfg.eta);
                master_tracker[k].update_despread(0, y_fused, cfg.eta, cfg);
                double power_cap = double(N) * stats.link(l, k).beta;
                for (int j = 0; j < L; ++j)
                    if (j != l)
                        power_cap +=
                            fusion.v[j].squaredNorm() * double(N) * stats.link(j, k).beta;
                LmmseInputs in;
                in.hbar =
                    cap_norm(master_tracker[k].hbar_hat[0].mean(cfg.p, cfg.tau_p), power_cap);
                in.rbreve = recover_rbreve(master_tracker[k].Qhat_tk[0], master_tracker[k].Qhat,
                                           in.hbar, cfg.p, cfg.tau_p);
                in.rbreve = cap_trace(in.rbreve, power_cap);
                in.rbreve =
                    consistent_rbreve(in.rbreve, master_tracker[k].Qhat_tk[0], cfg.p, cfg.tau_p);
                in.q_tk = master_tracker[k].Qhat_tk[0];
                in.y = y_fused;
                in.p_k = cfg.p;
                in.tau_p = cfg.tau_p;
                const VectorXcd z_est =
                    lmmse(in, "tracked mace UE " + std::to_string(k) + block_ctx);
                mace_est = z_est.segment(fusion.master_offset(), N);
                if (accumulate_block) {
                    // Closed-form column: true statistics conditioned on the
                    // realized (tracked) fusion vectors.
                    const VectorXcd zbar = fused_mean(fusion, stats, k);
                    const MatrixXcd rb = fused_rbreve(fusion, stats, k);
                    const MatrixXcd q = fused_true_q_tk(stats, cfg, fusion, k);
                    const MatrixXcd r_fused = zbar * zbar.adjoint() + rb;
                    ue[k].theory_mace_sum += theoretical_nmse(rb, r_fused, q, cfg.p, cfg.tau_p,
                                                              fusion.master_offset(), N);
                    ++ue[k].theory_mace_count;
                }
            }

            if (accumulate_block) {
                const VectorXcd& h_true = channels.at(l, k);
                accumulate(ue[k].acc[0], h_true, local_est[size_t(l) * K + k]);
                accumulate(ue[k].acc[1], h_true, extract_block(central_est[k], l, N));
                accumulate(ue[k].acc[2], h_true, mace_est);
            }
        }

        for (int j = 0; j < L; ++j) local_tracker[j].finish_block();
        central_tracker.finish_block();
        for (int k = 0; k < K; ++k) master_tracker[k].finish_block();
    }

    if (!dump_prefix.empty() && source == StatsSource::tracked) {
        dump_matrix_binary(dump_prefix + "_local0_Q.bin", local_tracker[0].Qhat);
        dump_matrix_csv(dump_prefix + "_local0_Q.csv", local_tracker[0].Qhat);
        dump_matrix_binary(dump_prefix + "_central_Q.bin", central_tracker.Qhat);
        dump_matrix_binary(dump_prefix + "_master0_Q.bin", master_tracker[0].Qhat);
    }

    RealizationResult result;
    result.nmse.resize(K);
    result.theory.resize(K);
    for (int k = 0; k < K; ++k) {
        for (int s = 0; s < 3; ++s) result.nmse[k][s] = ue[k].acc[s].nmse();
        result.theory[k][0] = ue[k].theory_const[0];
        result.theory[k][1] = ue[k].theory_const[1];
        result.theory[k][2] =
            ue[k].theory_mace_count > 0 ? ue[k].theory_mace_sum / double(ue[k].theory_mace_count)
                                        : 0.0;
    }
    return result;
}

RunResult run(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<double> values = spec.sweep_values;
    if (values.empty()) {
        SimConfig probe = spec.base;
        if (spec.sweep_param == "tau_p") values = {double(probe.tau_p)};
        else if (spec.sweep_param == "N") values = {double(probe.N)};
        else if (spec.sweep_param == "L") values = {double(probe.L)};
        else if (spec.sweep_param == "K") values = {double(probe.K)};
        else values = {probe.eta};
    }

    RunResult out;
    const RngStream root(spec.base.seed);
    for (size_t vi = 0; vi < values.size(); ++vi) {
        SimConfig cfg = spec.base;
        apply_sweep_value(cfg, spec.sweep_param, values[vi]);

        std::array<double, 3> nmse_sum{}, theory_sum{};
        long n_pairs = 0;
        for (int r = 0; r < spec.realizations; ++r) {
            RealizationResult rr;
            try {
                const std::string dump =
                    (!spec.dump_prefix.empty() && r == 0)
                        ? spec.dump_prefix + "_" + spec.sweep_param + format_double(values[vi])
                        : std::string();
                rr = run_realization(cfg, spec.stats_source,
                                     root.substream(rng_tag::kTagRealization, uint64_t(r)), dump);
            } catch (const std::exception& e) {
                throw std::runtime_error("sweep " + spec.sweep_param + "=" +
                                         format_double(values[vi]) + " realization " +
                                         std::to_string(r) + ": " + e.what());
            }
            for (int k = 0; k < cfg.K; ++k) {
                PairSample sample;
                sample.value = values[vi];
                sample.realization = r;
                sample.ue = k;
                sample.nmse = rr.nmse[k];
                sample.theory = rr.theory[k];
                out.samples.push_back(sample);
                for (int s = 0; s < 3; ++s) {
                    nmse_sum[s] += rr.nmse[k][s];
                    theory_sum[s] += rr.theory[k][s];
                }
                ++n_pairs;
            }
        }

        for (int s = 0; s < 3; ++s) {
            ResultRow row;
            row.scheme = to_string(kSchemes[s]);
            row.param = spec.sweep_param;
            row.value = values[vi];
            row.nmse = nmse_sum[s] / double(n_pairs);
            row.nmse_db = 10.0 * std::log10(row.nmse);
            row.nmse_theory = theory_sum[s] / double(n_pairs);
            row.fronthaul = fronthaul(kSchemes[s], cfg.L, cfg.N, cfg.tau_p);
            row.inv_dim = inversion_dim(kSchemes[s], cfg.L, cfg.N);
            row.realizations = spec.realizations;
            row.blocks = cfg.blocks;
            row.seed = spec.base.seed;
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << "scheme,param,value,nmse,nmse_db,nmse_theory,fronthaul,inv_dim,realizations,blocks,"
           "seed\n";
    for (const auto& r : rows) {
        out << r.scheme << ',' << r.param << ',' << format_double(r.value) << ','
            << format_double(r.nmse) << ',' << format_double(r.nmse_db) << ','
            << format_double(r.nmse_theory) << ',' << r.fronthaul << ',' << r.inv_dim << ','
            << r.realizations << ',' << r.blocks << ',' << r.seed << '\n';
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

void emit_plot_data(const std::vector<ResultRow>& rows, const std::string& prefix) {
    if (rows.empty()) throw std::invalid_argument("emit_plot_data: no rows");
    const std::string& param = rows.front().param;
    for (const auto& r : rows)
        if (r.param != param)
            throw std::invalid_argument("emit_plot_data: rows mix sweep parameters");

    for (Scheme s : kSchemes) {
        std::vector<const ResultRow*> series;
        for (const auto& r : rows)
            if (r.scheme == to_string(s)) series.push_back(&r);
        std::sort(series.begin(), series.end(),
                  [](const ResultRow* a, const ResultRow* b) { return a->value < b->value; });
        const std::string path = prefix + "_" + to_string(s) + ".dat";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("emit_plot_data: cannot open " + path);
        out << "# " << param << " nmse_db\n";
        for (const ResultRow* r : series)
            out << format_double(r->value) << ' ' << format_double(r->nmse_db) << '\n';
    }

    std::ofstream plot(prefix + ".plot", std::ios::binary);
    if (!plot) throw std::runtime_error("emit_plot_data: cannot open " + prefix + ".plot");
    plot << "set xlabel '" << param << "'\n"
         << "set ylabel 'NMSE [dB]'\n"
         << "set key bottom left\n"
         << "plot '" << prefix << "_local.dat' with linespoints title 'local', \\\n"
         << "     '" << prefix << "_central.dat' with linespoints title 'central', \\\n"
         << "     '" << prefix << "_mace.dat' with linespoints title 'mace'\n";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (std::abs(v - std::round(v)) > 1e-9)
        throw std::invalid_argument("config: '" + key + "' must be an integer, got " + value);
    return int(std::round(v));
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + value);
}

}  // namespace

void apply_sweep_string(ExperimentSpec& spec, const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("sweep must look like param=v1,v2,... got '" + s + "'");
    const std::string param = trim(s.substr(0, eq));
    if (!is_int_param(param) && param != "eta")
        throw std::invalid_argument("unknown sweep parameter '" + param + "'");
    std::vector<double> values;
    std::stringstream ss(s.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) values.push_back(parse_double(param, item));
    }
    if (values.empty()) throw std::invalid_argument("sweep has no values: '" + s + "'");
    spec.sweep_param = param;
    spec.sweep_values = values;
}

void apply_preset(ExperimentSpec& spec, const std::string& name) {
    if (name == "fig1") {
        spec.base.L = 3;
        spec.base.K = 5;
        spec.base.N = 5;
        spec.base.tau_p = 5;
        spec.base.p = 0.1;
        spec.base.blocks = 300;
        spec.sweep_param = "tau_p";
        spec.sweep_values = {3, 5, 7, 9};
    } else if (name == "fig2") {
        spec.base.L = 4;
        spec.base.K = 7;
        spec.base.N = 5;
        spec.base.tau_p = 5;
        spec.base.p = 0.1;
        spec.base.blocks = 300;
        spec.sweep_param = "N";
        spec.sweep_values = {2, 4, 8, 16};
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (expected fig1 or fig2)");
    }
}

void apply_config_file(ExperimentSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "L") spec.base.L = parse_int(key, value);
        else if (key == "N") spec.base.N = parse_int(key, value);
        else if (key == "K") spec.base.K = parse_int(key, value);
        else if (key == "tau_p") spec.base.tau_p = parse_int(key, value);
        else if (key == "p") spec.base.p = parse_double(key, value);
        else if (key == "sigma2") spec.base.sigma2 = parse_double(key, value);
        else if (key == "eta") spec.base.eta = parse_double(key, value);
        else if (key == "B") spec.base.B = parse_int(key, value);
        else if (key == "area_m") spec.base.area_m = parse_double(key, value);
        else if (key == "rician_offset") spec.base.rician_offset = parse_double(key, value);
        else if (key == "rician_slope") spec.base.rician_slope = parse_double(key, value);
        else if (key == "seed") spec.base.seed = std::stoull(value);
        else if (key == "blocks") spec.base.blocks = parse_int(key, value);
        else if (key == "warmup") spec.base.warmup = parse_int(key, value);
        else if (key == "realizations") spec.realizations = parse_int(key, value);
        else if (key == "stats") spec.stats_source = stats_source_from_string(value);
        else if (key == "sweep") apply_sweep_string(spec, value);
        else if (key == "out") spec.out_prefix = value;
        else if (key == "dump") spec.dump_prefix = value;
        else if (key == "normalize_fusion") spec.base.normalize_fusion = parse_bool(key, value);
        else if (key == "channel_mode") {
            if (value == "rician") spec.base.channel_mode = ChannelMode::rician;
            else if (value == "pure_los") spec.base.channel_mode = ChannelMode::pure_los;
            else if (value == "pure_nlos") spec.base.channel_mode = ChannelMode::pure_nlos;
            else throw std::invalid_argument("config: bad channel_mode '" + value + "'");
        } else if (key == "los_mode") {
            if (value == "running") spec.base.los_mode = LosMode::running;
            else if (value == "frozen") spec.base.los_mode = LosMode::frozen;
            else throw std::invalid_argument("config: bad los_mode '" + value + "'");
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
}

}  // namespace macesim
