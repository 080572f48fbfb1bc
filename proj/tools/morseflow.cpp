// morseflow: time maps, equilibria, reaction-diffusion runs, empirical
// connection digraphs and the finite-state multivalued-semiflow engine
// behind one reproducible command-line entry point.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morseflow/connections.hpp"
#include "morseflow/equilibria.hpp"
#include "morseflow/graph_json.hpp"
#include "morseflow/multiflow.hpp"
#include "morseflow/nonlinearity.hpp"
#include "morseflow/output.hpp"
#include "morseflow/pde.hpp"
#include "morseflow/timemap.hpp"

namespace {

using namespace morseflow;

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_property = 2;
constexpr int exit_numerical = 3;

unsigned long env_seed() {
    if (const char *s = std::getenv("MORSEFLOW_SEED")) {
        try {
            return std::stoul(s);
        } catch (const std::exception &) {
            throw std::domain_error("MORSEFLOW_SEED must be an unsigned integer");
        }
    }
    return 0;
}

std::string join_argv(int argc, char **argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i)
        os << (i ? " " : "") << argv[i];
    return os.str();
}

std::vector<double> parse_real_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    if (out.empty())
        throw std::domain_error("empty list argument");
    return out;
}

std::vector<int> parse_mode_list(const std::string &text) {
    // "1..6" or "1,2,5"
    const auto dots = text.find("..");
    std::vector<int> out;
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int k = lo; k <= hi; ++k)
            out.push_back(k);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(std::stoi(item));
    }
    if (out.empty())
        throw std::domain_error("empty mode list");
    return out;
}

/// "sin:k=1,amp=0.01", "random:seed=7,amp=2", or a CSV file of x,u rows
FieldState parse_initial_condition(const std::string &spec, const std::string &file, int N,
                                   unsigned long default_seed) {
    if (!file.empty()) {
        std::ifstream f(file);
        if (!f)
            throw std::domain_error("cannot open initial-condition file '" + file + "'");
        std::vector<double> xs, us;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 'x')
                continue;
            std::stringstream ss(line);
            std::string a, b;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
                throw std::domain_error("bad initial-condition row: '" + line + "'");
            xs.push_back(std::stod(a));
            us.push_back(std::stod(b));
        }
        if (static_cast<int>(us.size()) != N + 2)
            throw std::domain_error("initial-condition file must carry N+2 grid rows");
        return field_from_values(us);
    }
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::domain_error("bad initial-condition spec '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    std::map<std::string, double> kv;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::domain_error("bad initial-condition spec '" + spec + "'");
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    if (kind == "sin") {
        const int k = static_cast<int>(kv.count("k") ? kv["k"] : 1);
        const double amp = kv.count("amp") ? kv["amp"] : 0.01;
        return field_from_values(sine_field(N, k, amp));
    }
    if (kind == "random") {
        const unsigned long seed =
            kv.count("seed") ? static_cast<unsigned long>(kv["seed"]) : default_seed;
        const double amp = kv.count("amp") ? kv["amp"] : 1.0;
        return random_field(N, seed, amp);
    }
    throw std::domain_error("unknown initial-condition kind '" + kind + "'");
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int run_timemap(const std::string &command, const std::string &model_spec, double emin,
                double emax, int points, const std::string &spacing, const std::string &out) {
    Stopwatch clock;
    const NonlinearityModel model = parse_model_spec(model_spec);
    if (!(emin > 0.0 && emax > emin) || points < 1)
        throw std::domain_error("timemap: need 0 < emin < emax and points >= 1");
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid.push_back(spacing == "linear" ? emin + (emax - emin) * t
                                           : emin * std::pow(emax / emin, t));
    }
    CsvWriter csv;
    csv.header({"E", "tau_plus", "tau_minus", "quad_error_estimate"});
    for (double E : grid) {
        const TimeMapSample s = sample_time_map(model, E);
        csv.row({s.E, s.tau_plus, s.tau_minus, s.quad_error_estimate});
    }
    write_text_file(out, csv.str());

    RunManifest manifest;
    manifest.command = command;
    manifest.model_spec = model_spec;
    manifest.seed = env_seed();
    manifest.tolerances = {{"quad_rel_tol", TauOptions{}.rel_tol}};
    manifest.output_files = {out};
    manifest.wall_time_seconds = clock.seconds();
    write_manifest(out + ".manifest.json", manifest);
    return exit_ok;
}

int run_equilibria(const std::string &command, const std::string &model_spec, int N,
                   const std::string &out_dir) {
    Stopwatch clock;
    const NonlinearityModel model = parse_model_spec(model_spec);
    const auto eqs = enumerate_equilibria(model, N);
    std::filesystem::create_directories(out_dir);

    nlohmann::json index;
    index["model"] = model_spec;
    index["count"] = eqs.size();
    nlohmann::json list = nlohmann::json::array();
    std::vector<std::string> outputs;
    for (const auto &eq : eqs) {
        std::string name = id_string(eq.id);
        for (auto &c : name)
            if (c == '+')
                c = 'p';
            else if (c == '-')
                c = 'm';
        const std::string file = (std::filesystem::path(out_dir) / ("profile_" + name + ".csv")).string();
        CsvWriter csv;
        csv.header({"x", "u"});
        for (std::size_t i = 0; i < eq.profile.values.size(); ++i)
            csv.row({static_cast<double>(i) * eq.profile.dx, eq.profile.values[i]});
        write_text_file(file, csv.str());
        outputs.push_back(file);

        nlohmann::json entry;
        entry["id"] = id_string(eq.id);
        entry["branch"] = {{"n", eq.id.n}, {"kind", profile_kind_name(eq.id.kind)}};
        entry["energy"] = eq.profile.energy;
        entry["zeros"] = eq.profile.zeros;
        entry["norms"] = {{"l2", eq.profile.l2}, {"h10", eq.profile.h10}};
        entry["file"] = std::filesystem::path(file).filename().string();
        list.push_back(entry);
    }
    index["profiles"] = list;
    const std::string index_file = (std::filesystem::path(out_dir) / "index.json").string();
    write_text_file(index_file, index.dump(2) + "\n");
    outputs.push_back(index_file);

    RunManifest manifest;
    manifest.command = command;
    manifest.model_spec = model_spec;
    manifest.seed = env_seed();
    manifest.tolerances = {{"bc_tol", shoot_bc_tol}, {"branch_root_tol", branch_root_tol}};
    manifest.output_files = outputs;
    manifest.wall_time_seconds = clock.seconds();
    write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), manifest);
    return exit_ok;
}

int run_sweep(const std::string &command, const std::string &eps_text, int n,
              const std::string &kind_name, int N, double conv_tol, double trend_slack, int jobs,
              const std::string &out) {
    Stopwatch clock;
    const ProfileKind kind = kind_name == "minus" ? ProfileKind::minus : ProfileKind::plus;
    const auto sweep =
        convergence_sweep(parse_real_list(eps_text), n, kind, N, conv_tol, trend_slack, jobs);
    CsvWriter csv;
    csv.header({"eps", "dist_l2", "dist_h10", "dist_h10_to_zero"});
    for (const auto &r : sweep.rows)
        csv.row({r.eps, r.dist_l2, r.dist_h10, r.dist_h10_to_zero});
    write_text_file(out, csv.str());

    RunManifest manifest;
    manifest.command = command;
    manifest.model_spec = "heaviside family";
    manifest.seed = env_seed();
    manifest.tolerances = {{"conv_tol", conv_tol}, {"trend_slack", trend_slack}};
    manifest.output_files = {out};
    manifest.wall_time_seconds = clock.seconds();
    write_manifest(out + ".manifest.json", manifest);

    if (!sweep.final_ok || !sweep.trend_ok) {
        std::cerr << "sweep: convergence flags failed (final_ok=" << sweep.final_ok
                  << ", trend_ok=" << sweep.trend_ok << ")\n";
        return exit_numerical;
    }
    return exit_ok;
}

int run_simulate(const std::string &command, const std::string &model_spec,
                 const std::string &ic_spec, const std::string &ic_file, int N, double dt,
                 double t_max, double capture_tol, const std::string &out_dir) {
    Stopwatch clock;
    const NonlinearityModel model = parse_model_spec(model_spec);
    const FieldState u0 = parse_initial_condition(ic_spec, ic_file, N, env_seed());
    const auto eqs = enumerate_equilibria(model, N);
    std::vector<EquilibriumProfile> profiles;
    for (const auto &e : eqs)
        profiles.push_back(e.profile);

    CaptureOptions opts;
    opts.dt = dt;
    opts.t_max = t_max;
    opts.capture_tol = capture_tol;
    opts.lyapunov_every_step = true;
    const TrajectoryRecord rec = integrate_until_capture(model, u0, profiles, opts);

    std::filesystem::create_directories(out_dir);
    CsvWriter csv;
    csv.header({"time", "l2", "h10", "lyapunov", "min_dist_to_equilibrium"});
    for (const auto &s : rec.snapshots) {
        double dmin = std::numeric_limits<double>::infinity();
        for (double d : s.dist_to_equilibria)
            dmin = std::min(dmin, d);
        csv.row({s.time, s.l2, s.h10, s.lyapunov, dmin});
    }
    const std::string snap_file = (std::filesystem::path(out_dir) / "snapshots.csv").string();
    write_text_file(snap_file, csv.str());

    nlohmann::json summary;
    summary["model"] = model_spec;
    summary["captured"] = rec.captured ? nlohmann::json(id_string(eqs[*rec.captured].id))
                                       : nlohmann::json(nullptr);
    summary["capture_time"] = rec.capture_time;
    summary["timed_out"] = rec.timed_out;
    summary["lyapunov_violations"] = rec.lyapunov_violations;
    summary["absorbing_ok"] = rec.absorbing_ok;
    summary["absorbing_K"] = rec.absorbing_K;
    summary["est_slack"] = rec.est_slack;
    summary["sup_reaction_l2sq"] = rec.sup_reaction_l2sq;
    const std::string summary_file = (std::filesystem::path(out_dir) / "summary.json").string();
    write_text_file(summary_file, summary.dump(2) + "\n");

    RunManifest manifest;
    manifest.command = command;
    manifest.model_spec = model_spec;
    manifest.seed = env_seed();
    manifest.tolerances = {{"capture_tol", capture_tol},
                           {"lyap_tol_scale", 1e-8},
                           {"est_slack_scale", 1e-6}};
    manifest.output_files = {snap_file, summary_file};
    manifest.wall_time_seconds = clock.seconds();
    write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), manifest);

    if (!rec.absorbing_ok || rec.lyapunov_violations > 0) {
        std::cerr << "simulate: a-priori estimate violated along the run\n";
        return exit_property;
    }
    return exit_ok;
}

int run_connections(const std::string &command, const std::string &model_spec, int N,
                    const std::string &amps_text, const std::string &modes_text, double t_max,
                    int cut, int jobs, const std::string &out_dir) {
    Stopwatch clock;
    const NonlinearityModel model = parse_model_spec(model_spec);
    const auto eqs = enumerate_equilibria(model, N);
    ProbeOptions opts;
    if (!amps_text.empty())
        opts.amps = parse_real_list(amps_text);
    if (!modes_text.empty())
        opts.modes = parse_mode_list(modes_text);
    opts.capture.t_max = t_max;
    opts.jobs = jobs;
    ConnectionDigraph dg = probe_connections(model, eqs, opts);
    dg.aggregate_index = cut;

    const auto family = build_morse_family(dg, cut);
    const auto verdict = check_dynamically_gradient(dg, family);

    std::filesystem::create_directories(out_dir);
    nlohmann::json j = digraph_to_json(dg);
    nlohmann::json jv;
    jv["pass"] = verdict.pass;
    jv["label"] = verdict.label;
    jv["cut"] = cut;
    jv["delta"] = std::isfinite(family.delta) ? nlohmann::json(family.delta)
                                              : nlohmann::json("inf");
    jv["g1_failures"] = verdict.g1_failures;
    jv["homoclinic_selfloops"] = verdict.homoclinic_selfloops;
    jv["topological_order"] = verdict.topological_order;
    if (verdict.cycle)
        jv["cycle"] = *verdict.cycle;
    j["gradient_verdict"] = jv;
    const std::string json_file = (std::filesystem::path(out_dir) / "digraph.json").string();
    write_text_file(json_file, j.dump(2) + "\n");
    const std::string dot_file = (std::filesystem::path(out_dir) / "digraph.dot").string();
    write_text_file(dot_file, digraph_to_dot(dg));

    RunManifest manifest;
    manifest.command = command;
    manifest.model_spec = model_spec;
    manifest.seed = env_seed();
    manifest.tolerances = {{"capture_tol", opts.capture.capture_tol},
                           {"t_dwell", opts.capture.t_dwell}};
    manifest.output_files = {json_file, dot_file};
    manifest.wall_time_seconds = clock.seconds();
    write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), manifest);

    if (!verdict.pass) {
        std::cerr << "connections: dynamically-gradient check failed\n";
        return exit_property;
    }
    return exit_ok;
}

int run_morse_sweep(const std::string &command, const std::string &eps_text, int cut, int N,
                    double sweep_tol, int jobs, const std::string &out) {
    Stopwatch clock;
    const auto res = morse_distance_sweep(parse_real_list(eps_text), cut, N, sweep_tol, jobs);
    CsvWriter csv;
    csv.comment(res.note);
    csv.header({"eps", "set", "dist_h10"});
    for (const auto &r : res.rows)
        csv.row_strings({format_real(r.eps), r.set_label, format_real(r.dist_h10)});
    write_text_file(out, csv.str());

    RunManifest manifest;
    manifest.command = command;
    manifest.model_spec = "heaviside family";
    manifest.seed = env_seed();
    manifest.tolerances = {{"sweep_tol", sweep_tol}};
    manifest.output_files = {out};
    manifest.wall_time_seconds = clock.seconds();
    write_manifest(out + ".manifest.json", manifest);

    if (!res.trend_ok || !res.final_ok) {
        std::cerr << "morse-sweep: trend or terminal tolerance failed\n";
        return exit_numerical;
    }
    return exit_ok;
}

int run_graph_check(const std::string &in, const std::string &out) {
    const GraphInput input = load_graph_file(in);
    if (!input.family)
        throw std::domain_error("graph check: input file carries no family");
    const auto diag = is_dynamically_gradient(input.graph, *input.family);
    nlohmann::json j;
    j["gradient"] = diag.gradient;
    nlohmann::json uncovered = nlohmann::json::array();
    for (const auto &cls : diag.uncovered_recurrent_classes)
        uncovered.push_back(state_set_to_json(input.graph, cls));
    j["uncovered_recurrent_classes"] = uncovered;
    if (diag.homoclinic) {
        j["homoclinic_cycle"] = diag.homoclinic->cycle;
        j["homoclinic"] = diag.homoclinic->description;
    }
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty())
        write_text_file(out, text);
    return diag.gradient ? exit_ok : exit_property;
}

int run_graph_reorder(const std::string &in, const std::string &out) {
    const GraphInput input = load_graph_file(in);
    if (!input.family)
        throw std::domain_error("graph reorder: input file carries no family");
    const auto res = reorder_morse(input.graph, *input.family);
    nlohmann::json j;
    j["ok"] = res.ok;
    if (res.ok) {
        j["order"] = res.order;
        j["family"] = family_to_json(input.graph, res.reordered);
        const auto chain = morse_decomposition_chain(input.graph, res.reordered);
        nlohmann::json attractors = nlohmann::json::array();
        for (const auto &A : chain.attractors)
            attractors.push_back(state_set_to_json(input.graph, A));
        j["nested_attractors"] = attractors;
        j["morse_identity_ok"] = chain.identity_ok;
    } else if (res.failure) {
        j["failure"] = {{"stage", res.failure->stage}, {"reason", res.failure->reason}};
        nlohmann::json atts = nlohmann::json::array();
        for (const auto &A : res.failure->attractors_found)
            atts.push_back(state_set_to_json(input.graph, A));
        j["failure"]["attractors_found"] = atts;
    }
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty())
        write_text_file(out, text);
    return res.ok ? exit_ok : exit_property;
}

int run_graph_sweep(const std::string &in, const std::string &out) {
    const GraphInput input = load_graph_file(in);
    if (!input.family)
        throw std::domain_error("graph sweep: input file carries no family");
    if (input.eta_graphs.empty())
        throw std::domain_error("graph sweep: input file carries no eta_family");
    const auto rep = robustness_sweep(input.eta_graphs, *input.family);
    nlohmann::json j;
    j["note"] = rep.note;
    j["eta0"] = rep.eta0 ? nlohmann::json(*rep.eta0) : nlohmann::json(nullptr);
    j["first_bad_eta"] =
        rep.first_bad_eta ? nlohmann::json(*rep.first_bad_eta) : nlohmann::json(nullptr);
    j["stabilized_from_eta"] = rep.stabilized_from_eta ? nlohmann::json(*rep.stabilized_from_eta)
                                                       : nlohmann::json(nullptr);
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto &v : rep.verdicts) {
        nlohmann::json jv;
        jv["eta"] = v.eta;
        jv["gradient"] = v.gradient;
        if (v.diagnostics.homoclinic)
            jv["homoclinic"] = v.diagnostics.homoclinic->description;
        nlohmann::json derived = nlohmann::json::array();
        for (const auto &s : v.derived_sets)
            derived.push_back(state_set_to_json(input.graph, s));
        jv["derived_sets"] = derived;
        jv["derived_empty"] = v.derived_empty;
        jv["derived_disjoint_from_base"] = v.derived_disjoint_from_base;
        verdicts.push_back(jv);
    }
    j["verdicts"] = verdicts;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty())
        write_text_file(out, text);
    return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    const std::string command = join_argv(argc, argv);
    CLI::App app{"morseflow: Chafee-Infante stationary analysis and multivalued-semiflow checks"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for sweeps and probes");

    // timemap
    auto *tm = app.add_subcommand("timemap", "emit tau+/tau- over an energy grid");
    std::string tm_model = "sat:lambda=50", tm_out = "tau.csv", tm_spacing = "log";
    double tm_emin = 1e-8, tm_emax = 10.0;
    int tm_points = 40;
    tm->add_option("--model", tm_model, "model spec string");
    tm->add_option("--emin", tm_emin);
    tm->add_option("--emax", tm_emax);
    tm->add_option("--points", tm_points);
    tm->add_option("--spacing", tm_spacing)->check(CLI::IsMember({"log", "linear"}));
    tm->add_option("--out", tm_out)->required();

    // equilibria
    auto *eq = app.add_subcommand("equilibria", "enumerate stationary profiles");
    std::string eq_model = "heaviside:eps=0.2", eq_dir = "eq";
    int eq_grid = default_sweep_grid;
    eq->add_option("--model", eq_model);
    eq->add_option("--grid", eq_grid);
    eq->add_option("--out-dir", eq_dir)->required();

    // sweep
    auto *sw = app.add_subcommand("sweep", "eps convergence of equilibria to the inclusion limit");
    std::string sw_eps = "0.3,0.2,0.1,0.05", sw_kind = "plus", sw_out = "sweep.csv";
    int sw_n = 1, sw_grid = default_sweep_grid;
    double sw_conv_tol = 0.05, sw_trend_slack = 0.0;
    sw->add_option("--eps", sw_eps);
    sw->add_option("--n", sw_n);
    sw->add_option("--kind", sw_kind)->check(CLI::IsMember({"plus", "minus"}));
    sw->add_option("--grid", sw_grid);
    sw->add_option("--conv-tol", sw_conv_tol);
    sw->add_option("--trend-slack", sw_trend_slack);
    sw->add_option("--out", sw_out)->required();

    // simulate
    auto *sim = app.add_subcommand("simulate", "integrate one trajectory until capture");
    std::string sim_model = "heaviside:eps=0.2", sim_ic = "sin:k=1,amp=0.01", sim_ic_file,
                sim_dir = "run";
    int sim_grid = 255;
    double sim_dt = 0.0, sim_tmax = 50.0, sim_capture_tol = 1e-3;
    sim->add_option("--model", sim_model);
    sim->add_option("--ic", sim_ic, "sin:k=..,amp=.. or random:seed=..,amp=..");
    sim->add_option("--ic-file", sim_ic_file, "CSV of x,u rows on the run grid");
    sim->add_option("--grid", sim_grid);
    sim->add_option("--dt", sim_dt, "0 picks dt_max(model)");
    sim->add_option("--tmax", sim_tmax);
    sim->add_option("--capture-tol", sim_capture_tol);
    sim->add_option("--out-dir", sim_dir)->required();

    // connections
    auto *conn = app.add_subcommand("connections", "probe the equilibrium connection digraph");
    std::string conn_model = "heaviside:eps=0.1", conn_amps, conn_modes, conn_dir = "conn";
    int conn_grid = 511, conn_cut = 1;
    double conn_tmax = 50.0;
    conn->add_option("--model", conn_model);
    conn->add_option("--grid", conn_grid);
    conn->add_option("--amps", conn_amps, "comma list, defaults to 0.01,0.03");
    conn->add_option("--modes", conn_modes, "e.g. 1..6 or 1,2,3");
    conn->add_option("--tmax", conn_tmax);
    conn->add_option("--cut", conn_cut, "aggregate level of the Morse family");
    conn->add_option("--out-dir", conn_dir)->required();

    // morse-sweep
    auto *ms = app.add_subcommand("morse-sweep", "Hausdorff semidistance of Morse sets over eps");
    std::string ms_eps = "0.3,0.2,0.1", ms_out = "morse.csv";
    int ms_cut = 1, ms_grid = 511;
    double ms_tol = 0.05;
    ms->add_option("--eps", ms_eps);
    ms->add_option("--cut", ms_cut);
    ms->add_option("--grid", ms_grid);
    ms->add_option("--sweep-tol", ms_tol);
    ms->add_option("--out", ms_out)->required();

    // graph
    auto *gr = app.add_subcommand("graph", "finite-state multivalued-semiflow engine");
    gr->require_subcommand(1);
    std::string g_in, g_out;
    auto *gc = gr->add_subcommand("check", "dynamically-gradient verdict for the family");
    gc->add_option("--in", g_in)->required();
    gc->add_option("--out", g_out);
    auto *gre = gr->add_subcommand("reorder", "Morse reordering of the family");
    gre->add_option("--in", g_in)->required();
    gre->add_option("--out", g_out);
    auto *gs = gr->add_subcommand("sweep", "robustness sweep over the eta family");
    gs->add_option("--in", g_in)->required();
    gs->add_option("--out", g_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (tm->parsed())
            return run_timemap(command, tm_model, tm_emin, tm_emax, tm_points, tm_spacing, tm_out);
        if (eq->parsed())
            return run_equilibria(command, eq_model, eq_grid, eq_dir);
        if (sw->parsed())
            return run_sweep(command, sw_eps, sw_n, sw_kind, sw_grid, sw_conv_tol, sw_trend_slack,
                             jobs, sw_out);
        if (sim->parsed())
            return run_simulate(command, sim_model, sim_ic, sim_ic_file, sim_grid, sim_dt,
                                sim_tmax, sim_capture_tol, sim_dir);
        if (conn->parsed())
            return run_connections(command, conn_model, conn_grid, conn_amps, conn_modes,
                                   conn_tmax, conn_cut, jobs, conn_dir);
        if (ms->parsed())
            return run_morse_sweep(command, ms_eps, ms_cut, ms_grid, ms_tol, jobs, ms_out);
        if (gr->parsed()) {
            if (gc->parsed())
                return run_graph_check(g_in, g_out);
            if (gre->parsed())
                return run_graph_reorder(g_in, g_out);
            if (gs->parsed())
                return run_graph_sweep(g_in, g_out);
        }
        throw std::domain_error("no subcommand selected");
    } catch (const numerical_error &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    } catch (const structural_error &e) {
        std::cerr << "property failure: " << e.what() << "\n";
        return exit_property;
    } catch (const std::domain_error &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
}
