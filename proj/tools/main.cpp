// mudae: matrix-measure stability certification for DAE power-system models.
//
// Subcommands: model, equilibrium, eigs, rootlocus, sensitivity,
// certify {point,box,grow}, scan, area, rerun.

#include "mudae/certify.hpp"
#include "mudae/errors.hpp"
#include "mudae/io.hpp"
#include "mudae/measures.hpp"
#include "mudae/model.hpp"
#include "mudae/parallel.hpp"
#include "mudae/regionscan.hpp"
#include "mudae/spectra.hpp"
#include "mudae/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace mudae;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

// ---------------------------------------------------------------------------
// Small parsing helpers.

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string::size_type pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        out.push_back(text.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == nullptr || *end != '\0')
        throw InputError(what + ": '" + text + "' is not a number");
    return v;
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
    const auto parts = split(text, ',');
    Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = parse_number(parts[i], what);
    return v;
}

// ---------------------------------------------------------------------------
// Model resolution shared by all subcommands.

struct ModelOptions {
    std::string builtin = "twobus";
    std::string file;
    std::vector<std::string> params; // key=value overrides for the builtin

    void attach(CLI::App* cmd) {
        cmd->add_option("--builtin", builtin, "Built-in model name (twobus)");
        cmd->add_option("--file", file, "Model JSON file");
        cmd->add_option("--param", params,
                        "Override a built-in parameter, e.g. --param d_damp=0.1");
    }

    AffineJacobianModel resolve(std::map<std::string, std::string>& inputs) const {
        if (!file.empty()) {
            if (!params.empty())
                throw InputError("--param only applies to --builtin models");
            const std::string text = read_text_file(file);
            inputs[file] = "fnv1a64:" + std::to_string(fnv1a64(text));
            return model_from_json(text);
        }
        if (builtin != "twobus")
            throw InputError("unknown builtin model: " + builtin);
        TwoBusParams p;
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw InputError("--param expects key=value, got: " + kv);
            const std::string key = kv.substr(0, eq);
            const double value = parse_number(kv.substr(eq + 1), "--param " + key);
            if (key == "e_emf") p.e_emf = value;
            else if (key == "x_dp") p.x_dp = value;
            else if (key == "r_line") p.r_line = value;
            else if (key == "x_line") p.x_line = value;
            else if (key == "p_load") p.p_load = value;
            else if (key == "q_load") p.q_load = value;
            else if (key == "p_m") p.p_m = value;
            else if (key == "m_inertia") p.m_inertia = value;
            else if (key == "d_damp") p.d_damp = value;
            else throw InputError("unknown two-bus parameter: " + key);
        }
        return build_two_bus(p);
    }
};

int find_var(const AffineJacobianModel& model, const std::string& name) {
    for (int i = 0; i < model.order(); ++i)
        if (model.var_name(i) == name) return i;
    char* end = nullptr;
    const long idx = std::strtol(name.c_str(), &end, 10);
    if (end != nullptr && *end == '\0' && idx >= 0 && idx < model.order())
        return static_cast<int>(idx);
    throw InputError("unknown variable: " + name);
}

Axis parse_axis(const AffineJacobianModel& model, const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 4)
        throw InputError("axis spec must be var:lo:hi:steps, got: " + text);
    const double lo = parse_number(parts[1], "axis lo");
    const double hi = parse_number(parts[2], "axis hi");
    const int steps = static_cast<int>(parse_number(parts[3], "axis steps"));
    if (parts[0] == "vmag") {
        // The magnitude axis needs a voltage pair; detect Vx*/Vy* names.
        int ix = -1, iy = -1;
        for (int i = 0; i < model.order(); ++i) {
            const std::string name = model.var_name(i);
            if (name.rfind("Vx", 0) == 0 && ix < 0) ix = i;
            if (name.rfind("Vy", 0) == 0 && iy < 0) iy = i;
        }
        if (ix < 0 || iy < 0)
            throw InputError("vmag axis requires Vx*/Vy* variables in the model");
        return Axis::voltage_magnitude(ix, iy, lo, hi, steps);
    }
    return Axis::physical(find_var(model, parts[0]), lo, hi, steps);
}

// ---------------------------------------------------------------------------
// Manifest: every run records version, argv, input hashes, and output hashes
// beside its primary output, so any run can be reproduced byte-for-byte.

struct RunContext {
    std::vector<std::string> argv;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;

    void write_output(const std::string& path, const std::string& content) {
        write_text_file(path, content);
        outputs[path] = "fnv1a64:" + std::to_string(fnv1a64(content));
    }

    void finish(const std::string& command, std::uint64_t seed,
                const std::string& beside) const {
        std::string out = "{\n";
        out += "  \"toolkit\": \"mudae\",\n";
        out += "  \"version\": \"" + std::string(kVersion) + "\",\n";
        out += "  \"command\": \"" + command + "\",\n";
        out += "  \"seed\": " + std::to_string(seed) + ",\n";
        out += "  \"argv\": [";
        for (std::size_t i = 0; i < argv.size(); ++i) {
            if (i > 0) out += ",";
            std::string escaped;
            for (char c : argv[i]) {
                if (c == '"' || c == '\\') escaped += '\\';
                escaped += c;
            }
            out += "\"" + escaped + "\"";
        }
        out += "],\n";
        auto map_json = [](const std::map<std::string, std::string>& m) {
            std::string s = "{";
            bool first = true;
            for (const auto& [k, v] : m) {
                if (!first) s += ",";
                first = false;
                s += "\"" + k + "\":\"" + v + "\"";
            }
            return s + "}";
        };
        out += "  \"inputs\": " + map_json(inputs) + ",\n";
        out += "  \"outputs\": " + map_json(outputs) + "\n";
        out += "}\n";
        write_text_file(beside + ".manifest.json", out);
    }
};

int resolve_cli_threads(int threads_flag) {
    if (threads_flag > 0) return threads_flag;
    if (const char* env = std::getenv("MUDAE_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return resolve_threads(0);
}

AuxiliaryMatrix resolve_z(const AffineJacobianModel& model,
                          const std::string& z_file, RunContext& ctx) {
    if (!z_file.empty()) {
        const std::string text = read_text_file(z_file);
        ctx.inputs[z_file] = "fnv1a64:" + std::to_string(fnv1a64(text));
        return aux_matrix_from_json(text);
    }
    return construct_z_star(model, evaluate_lift(model, model.base_point)).z;
}

// ---------------------------------------------------------------------------
// Subcommand implementations.

int cmd_model(const ModelOptions& mopts, const std::string& export_path,
              RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    const auto blocks = block_partition(
        jacobian_at(model, evaluate_lift(model, model.base_point)), model.n, model.m);

    std::printf("model: n=%d m=%d lift=%d\n", model.n, model.m, model.lift_size());
    std::printf("variables:");
    for (int i = 0; i < model.order(); ++i)
        std::printf(" %s", model.names[static_cast<std::size_t>(i)].c_str());
    std::printf("\nlift coordinates:");
    for (int k = 0; k < model.lift_size(); ++k)
        std::printf(" %s", model.coord_name(k).c_str());
    std::printf("\nbase point:");
    for (int i = 0; i < model.order(); ++i)
        std::printf(" %s", format_double(model.base_point[i]).c_str());
    std::printf("\nD-block condition: %s\n",
                format_double(d_block_condition(blocks)).c_str());
    std::printf("residuals: %s\n", model.has_residuals() ? "closed-form" : "absent");

    if (!export_path.empty()) {
        ctx.write_output(export_path, model_to_json(model));
        ctx.finish("model", 0, export_path);
    }
    return kExitOk;
}

int cmd_equilibrium(const ModelOptions& mopts, const std::string& guess_text,
                    const std::string& out, RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    Eigen::VectorXd guess = model.base_point;
    if (!guess_text.empty()) {
        guess = parse_vector(guess_text, "--guess");
        if (guess.size() != model.order())
            throw InputError("--guess length must be n + m");
    }
    const Eigen::VectorXd eq = solve_equilibrium(model, guess);
    const double resid = residuals(model, eq).inf_norm();

    std::string json = "{\"point\":[";
    for (int i = 0; i < model.order(); ++i) {
        if (i > 0) json += ",";
        json += format_double(eq[i]);
    }
    json += "],\"residual_inf\":" + format_double(resid) + "}\n";
    std::printf("equilibrium:");
    for (int i = 0; i < model.order(); ++i)
        std::printf(" %s", format_double(eq[i]).c_str());
    std::printf("\nresidual_inf: %s\n", format_double(resid).c_str());

    if (!out.empty()) {
        ctx.write_output(out, json);
        ctx.finish("equilibrium", 0, out);
    }
    return kExitOk;
}

int cmd_eigs(const ModelOptions& mopts, const std::string& at_text,
             const std::string& out, RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    Eigen::VectorXd point = model.base_point;
    if (!at_text.empty()) {
        point = parse_vector(at_text, "--at");
        if (point.size() != model.order())
            throw InputError("--at length must be n + m");
    }
    const PencilSpectrum spec =
        pencil_finite_spectrum(model, evaluate_lift(model, point));
    const std::string csv = eigs_csv(spec);
    std::fputs(csv.c_str(), stdout);
    if (!out.empty()) {
        ctx.write_output(out, csv);
        ctx.finish("eigs", 0, out);
    }
    return kExitOk;
}

int cmd_rootlocus(const ModelOptions& mopts, const std::string& var,
                  std::optional<double> from, std::optional<double> to, int steps,
                  const std::string& out, RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    const int var_idx = find_var(model, var);
    const double lo = from.value_or(model.base_point[var_idx]);
    const double hi = to.value_or(model.base_point[var_idx] + 1.6);
    const auto sweep = root_locus_sweep(model, var_idx, lo, hi, steps);
    const std::string csv = rootlocus_csv(sweep, model.n);
    if (!out.empty()) {
        ctx.write_output(out, csv);
        ctx.finish("rootlocus", 0, out);
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    int crossings = 0, infeasible = 0;
    for (const auto& step : sweep) {
        crossings += step.crossing ? 1 : 0;
        infeasible += step.feasible ? 0 : 1;
    }
    std::printf("rootlocus: %d steps, %d crossing events, %d infeasible\n", steps,
                crossings, infeasible);
    return kExitOk;
}

int cmd_sensitivity(const ModelOptions& mopts, const std::string& var,
                    std::optional<double> from, std::optional<double> to, int steps,
                    int eig, const std::string& coords_text, const std::string& out,
                    RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    const int var_idx = find_var(model, var);
    const double lo = from.value_or(model.base_point[var_idx]);
    const double hi = to.value_or(model.base_point[var_idx] + 1.6);

    std::vector<int> coords;
    if (coords_text.empty()) {
        for (int k = 0; k < model.lift_size(); ++k) coords.push_back(k);
    } else {
        for (const auto& part : split(coords_text, ',')) {
            bool found = false;
            for (int k = 0; k < model.lift_size(); ++k)
                if (model.coord_name(k) == part) {
                    coords.push_back(k);
                    found = true;
                    break;
                }
            if (!found)
                coords.push_back(static_cast<int>(parse_number(part, "--coords")));
        }
    }

    const auto sweep = sensitivity_sweep(model, var_idx, lo, hi, steps, eig, coords);
    const std::string csv = sensitivity_csv(sweep, model, coords, var_idx);
    if (!out.empty()) {
        ctx.write_output(out, csv);
        ctx.finish("sensitivity", 0, out);
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return kExitOk;
}

int cmd_certify_point(const ModelOptions& mopts, const std::string& at_text,
                      const std::string& z_file, const std::string& out,
                      RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    Eigen::VectorXd point = model.base_point;
    if (!at_text.empty()) point = parse_vector(at_text, "--at");
    if (point.size() != model.order())
        throw InputError("--at length must be n + m");
    const Eigen::VectorXd z = evaluate_lift(model, point);

    std::optional<AuxiliaryMatrix> fixed;
    if (!z_file.empty()) fixed = resolve_z(model, z_file, ctx);

    const PointCheck check = certify_point(model, z, fixed);
    std::printf("certify point: %s (zeta = %s)\n",
                check.certified ? "CERTIFIED" : "not certified",
                std::isnan(check.zeta) ? "n/a" : format_double(check.zeta).c_str());
    if (!check.certified && !check.reason.empty())
        std::printf("reason: %s\n", check.reason.c_str());

    if (!out.empty() && check.z.has_value()) {
        Certificate cert{*check.z, check.zeta, z, check.mode};
        ctx.write_output(out, certificate_to_json(cert));
        ctx.finish("certify-point", 0, out);
    }
    return check.certified ? kExitOk : kExitNotCertified;
}

int cmd_certify_box(const ModelOptions& mopts, const std::string& box_file,
                    const std::string& z_file, const std::string& out, int threads,
                    RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    if (box_file.empty()) throw InputError("certify box requires --box-file");
    const std::string box_text = read_text_file(box_file);
    ctx.inputs[box_file] = "fnv1a64:" + std::to_string(fnv1a64(box_text));
    BoxSpec box;
    try {
        box = box_from_json(box_text);
    } catch (const ParseError&) {
        box = box_from_certificate_json(box_text); // grown-box output re-load
    }
    const AuxiliaryMatrix z = resolve_z(model, z_file, ctx);
    const CertifiedBox cb = certify_box(model, box, z, threads);

    std::printf("certify box: %s (zeta_star = %s over %lld vertices)\n",
                cb.certified() ? "CERTIFIED" : "not certified",
                format_double(cb.zeta_star).c_str(),
                static_cast<long long>(cb.vertex_count));
    if (!out.empty()) {
        ctx.write_output(out, certified_box_to_json(cb));
        ctx.finish("certify-box", 0, out);
    }
    return cb.certified() ? kExitOk : kExitNotCertified;
}

int cmd_certify_grow(const ModelOptions& mopts, const std::string& center_text,
                     const std::string& weights_text, double tol,
                     const std::string& z_file, const std::string& out, int threads,
                     RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    Eigen::VectorXd center = model.base_point;
    if (!center_text.empty()) center = parse_vector(center_text, "--center");
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(model.order());
    if (!weights_text.empty()) weights = parse_vector(weights_text, "--weights");
    if (center.size() != model.order() || weights.size() != model.order())
        throw InputError("--center/--weights length must be n + m");

    const AuxiliaryMatrix z = resolve_z(model, z_file, ctx);
    const GrowResult grown = grow_box(model, center, weights, z, tol, threads);

    std::printf("grow: alpha_max = %s%s, zeta_star = %s, vertices = %lld\n",
                format_double(grown.alpha_max).c_str(),
                grown.capped ? " (capped)" : "",
                format_double(grown.box.zeta_star).c_str(),
                static_cast<long long>(grown.box.vertex_count));
    if (!out.empty()) {
        ctx.write_output(out, certified_box_to_json(grown.box, grown.alpha_max));
        ctx.finish("certify-grow", 0, out);
    }
    return kExitOk;
}

int cmd_scan(const ModelOptions& mopts, const std::string& grid_text,
             const std::string& modes_text, const std::string& z_file,
             const std::string& out, int threads, RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    const auto axes = split(grid_text, ',');
    if (axes.size() != 2)
        throw InputError("--grid expects axis1,axis2 (var:lo:hi:steps each)");
    const Axis axis1 = parse_axis(model, axes[0]);
    const Axis axis2 = parse_axis(model, axes[1]);

    std::vector<ClassifyMode> modes;
    std::optional<AuxiliaryMatrix> z;
    for (const auto& name : split(modes_text, ',')) {
        if (name == "exact") {
            modes.push_back(ClassifyMode::exact());
        } else if (name == "bmi") {
            if (!z.has_value()) z = resolve_z(model, z_file, ctx);
            modes.push_back(ClassifyMode::bmi_fixed(*z));
        } else if (name == "bmi_at_point") {
            modes.push_back(ClassifyMode::bmi_at_point());
        } else {
            throw InputError("unknown mode: " + name);
        }
    }

    const ScanResult scan = scan_grid(model, axis1, axis2, modes, threads);
    const std::string csv = scan_csv(model, scan);
    if (!out.empty()) {
        ctx.write_output(out, csv);
        ctx.finish("scan", 0, out);
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return kExitOk;
}

int cmd_area(const ModelOptions& mopts, const std::string& centers_file,
             const std::string& pm_sweep, const std::string& half_widths_text,
             std::int64_t samples, std::uint64_t seed, const std::string& out,
             int threads, RunContext& ctx) {
    const auto model = mopts.resolve(ctx.inputs);
    if (samples < 1) throw InputError("--samples must be >= 1");

    std::vector<Eigen::VectorXd> centers;
    if (!centers_file.empty()) {
        const std::string text = read_text_file(centers_file);
        ctx.inputs[centers_file] = "fnv1a64:" + std::to_string(fnv1a64(text));
        const auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.contains("centers"))
            throw ParseError("centers file must be {\"centers\": [[...], ...]}");
        for (const auto& row : doc["centers"]) {
            Eigen::VectorXd c(model.order());
            if (static_cast<int>(row.size()) != model.order())
                throw ParseError("center length must be n + m");
            for (int i = 0; i < model.order(); ++i) c[i] = row[static_cast<std::size_t>(i)].get<double>();
            centers.push_back(c);
        }
    } else if (!pm_sweep.empty()) {
        // Equilibrium continuation in mechanical power (builtin two-bus only).
        if (!model.two_bus.has_value())
            throw InputError("--pm-sweep requires a two-bus model");
        const auto parts = split(pm_sweep, ':');
        if (parts.size() != 3)
            throw InputError("--pm-sweep expects lo:hi:steps");
        const double lo = parse_number(parts[0], "--pm-sweep lo");
        const double hi = parse_number(parts[1], "--pm-sweep hi");
        const int steps = static_cast<int>(parse_number(parts[2], "--pm-sweep steps"));
        Eigen::VectorXd guess = model.base_point;
        for (int i = 0; i < steps; ++i) {
            TwoBusParams p = *model.two_bus;
            p.p_m = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
            const auto mi = build_two_bus(p);
            try {
                guess = solve_equilibrium(mi, guess);
                centers.push_back(guess);
            } catch (const ConvergenceError&) {
                break; // past the deliverability limit
            }
        }
    } else {
        centers.push_back(model.base_point);
    }
    if (centers.empty()) throw InputError("no feasible centers");

    Eigen::VectorXd hw = Eigen::VectorXd::Zero(model.order());
    if (!half_widths_text.empty()) hw = parse_vector(half_widths_text, "--half-widths");
    if (hw.size() != model.order())
        throw InputError("--half-widths length must be n + m");

    const AreaExperiment exp =
        area_vs_sigma_experiment(model, centers, hw, samples, seed, threads);
    const std::string csv = area_csv(exp.centers);
    const std::string fits = fits_json(exp.fit_exact, exp.fit_bmi);
    if (!out.empty()) {
        ctx.write_output(out, csv);
        ctx.write_output(out + ".fit.json", fits);
        ctx.finish("area", seed, out);
    } else {
        std::fputs(csv.c_str(), stdout);
        std::fputs(fits.c_str(), stdout);
    }
    return kExitOk;
}

int dispatch(const std::vector<std::string>& argv);

int cmd_rerun(const std::string& manifest_path) {
    const std::string text = read_text_file(manifest_path);
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.contains("argv"))
        throw ParseError("manifest has no argv record");
    std::vector<std::string> argv;
    for (const auto& a : doc["argv"]) argv.push_back(a.get<std::string>());
    if (argv.empty()) throw ParseError("manifest argv is empty");
    return dispatch(argv);
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& argv) {
    CLI::App app{"mudae: logarithmic-norm stability certification for DAE models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a TOML/INI file");

    RunContext ctx;
    ctx.argv = argv;

    int threads_flag = 0;
    app.add_option("--threads", threads_flag,
                   "Worker cap (default: MUDAE_THREADS or hardware)");

    // model
    auto* model_cmd = app.add_subcommand("model", "Inspect or export a model");
    ModelOptions model_opts;
    model_opts.attach(model_cmd);
    std::string export_path;
    model_cmd->add_option("--export", export_path, "Write the model JSON here");

    // equilibrium
    auto* eq_cmd = app.add_subcommand("equilibrium", "Solve (f, g) = 0");
    ModelOptions eq_opts;
    eq_opts.attach(eq_cmd);
    std::string eq_guess, eq_out;
    eq_cmd->add_option("--guess", eq_guess, "Initial point v0,v1,...");
    eq_cmd->add_option("--out", eq_out, "Equilibrium JSON path");

    // eigs
    auto* eigs_cmd = app.add_subcommand("eigs", "Finite pencil spectrum");
    ModelOptions eigs_opts;
    eigs_opts.attach(eigs_cmd);
    std::string eigs_at, eigs_out;
    eigs_cmd->add_option("--at", eigs_at, "Physical point (default: base point)");
    eigs_cmd->add_option("--out", eigs_out, "CSV path");

    // rootlocus
    auto* locus_cmd = app.add_subcommand("rootlocus", "Eigenvalue sweep CSV");
    ModelOptions locus_opts;
    locus_opts.attach(locus_cmd);
    std::string locus_var = "delta", locus_out;
    std::optional<double> locus_from, locus_to;
    int locus_steps = 161;
    locus_cmd->add_option("--var", locus_var, "Swept dynamic variable");
    locus_cmd->add_option("--from", locus_from, "Sweep start (default: base value)");
    locus_cmd->add_option("--to", locus_to, "Sweep end (default: base + 1.6)");
    locus_cmd->add_option("--steps", locus_steps, "Sweep steps");
    locus_cmd->add_option("--out", locus_out, "CSV path");

    // sensitivity
    auto* sens_cmd = app.add_subcommand("sensitivity", "Eigenvalue sensitivity CSV");
    ModelOptions sens_opts;
    sens_opts.attach(sens_cmd);
    std::string sens_var = "delta", sens_coords, sens_out;
    std::optional<double> sens_from, sens_to;
    int sens_steps = 41, sens_eig = 0;
    sens_cmd->add_option("--var", sens_var, "Swept dynamic variable");
    sens_cmd->add_option("--from", sens_from, "Sweep start");
    sens_cmd->add_option("--to", sens_to, "Sweep end");
    sens_cmd->add_option("--steps", sens_steps, "Sweep steps");
    sens_cmd->add_option("--eig", sens_eig, "Tracked eigenvalue slot");
    sens_cmd->add_option("--coords", sens_coords,
                         "Lifted coordinates (names or indices; default: all)");
    sens_cmd->add_option("--out", sens_out, "CSV path");

    // certify {point, box, grow}
    auto* certify_cmd = app.add_subcommand("certify", "Stability certificates");
    certify_cmd->require_subcommand(1);

    auto* point_cmd = certify_cmd->add_subcommand("point", "Certify one point");
    ModelOptions point_opts;
    point_opts.attach(point_cmd);
    std::string point_at, point_z, point_out;
    point_cmd->add_option("--at", point_at, "Physical point (default: base point)");
    point_cmd->add_option("--z-file", point_z, "Reuse Z from a certificate JSON");
    point_cmd->add_option("--out", point_out, "Certificate JSON path");

    auto* box_cmd = certify_cmd->add_subcommand("box", "Certify a physical box");
    ModelOptions box_opts;
    box_opts.attach(box_cmd);
    std::string box_file, box_z, box_out;
    box_cmd->add_option("--box-file", box_file, "Box JSON path")->required();
    box_cmd->add_option("--z-file", box_z, "Reuse Z from a certificate JSON");
    box_cmd->add_option("--out", box_out, "Certified-box JSON path");

    auto* grow_cmd = certify_cmd->add_subcommand("grow", "Grow a certified box");
    ModelOptions grow_opts;
    grow_opts.attach(grow_cmd);
    std::string grow_center, grow_weights, grow_z, grow_out;
    double grow_tol = 1e-3;
    grow_cmd->add_option("--center", grow_center, "Center (default: base point)");
    grow_cmd->add_option("--weights", grow_weights,
                         "Per-variable relative widths (default: all ones)");
    grow_cmd->add_option("--tol", grow_tol, "Relative bisection tolerance");
    grow_cmd->add_option("--z-file", grow_z, "Reuse Z from a certificate JSON");
    grow_cmd->add_option("--out", grow_out, "Certified-box JSON path");

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "Classify a 2-D grid");
    ModelOptions scan_opts;
    scan_opts.attach(scan_cmd);
    std::string scan_grid_text, scan_modes = "exact,bmi", scan_z, scan_out;
    scan_cmd->add_option("--grid", scan_grid_text, "axis1,axis2 as var:lo:hi:steps")
        ->required();
    scan_cmd->add_option("--modes", scan_modes, "exact,bmi,bmi_at_point");
    scan_cmd->add_option("--z-file", scan_z, "Reuse Z from a certificate JSON");
    scan_cmd->add_option("--out", scan_out, "CSV path");

    // area
    auto* area_cmd = app.add_subcommand("area", "Stable-area measure experiment");
    ModelOptions area_opts;
    area_opts.attach(area_cmd);
    std::string area_centers, area_pm, area_hw, area_out;
    std::int64_t area_samples = 2000;
    std::uint64_t area_seed = 1;
    area_cmd->add_option("--centers-file", area_centers, "{\"centers\": [[...]]}");
    area_cmd->add_option("--pm-sweep", area_pm,
                         "Generate centers by P_m continuation, lo:hi:steps");
    area_cmd->add_option("--half-widths", area_hw, "Per-variable box half-widths");
    area_cmd->add_option("--samples", area_samples, "Samples per center");
    area_cmd->add_option("--seed", area_seed, "Sampling seed");
    area_cmd->add_option("--out", area_out, "CSV path (fit lands beside it)");

    // rerun
    auto* rerun_cmd = app.add_subcommand("rerun", "Re-execute a run manifest");
    std::string rerun_manifest;
    rerun_cmd->add_option("manifest", rerun_manifest, "Path to *.manifest.json")
        ->required();

    std::vector<const char*> cargv;
    cargv.reserve(argv.size());
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const int threads = resolve_cli_threads(threads_flag);

    if (model_cmd->parsed()) return cmd_model(model_opts, export_path, ctx);
    if (eq_cmd->parsed()) return cmd_equilibrium(eq_opts, eq_guess, eq_out, ctx);
    if (eigs_cmd->parsed()) return cmd_eigs(eigs_opts, eigs_at, eigs_out, ctx);
    if (locus_cmd->parsed())
        return cmd_rootlocus(locus_opts, locus_var, locus_from, locus_to, locus_steps,
                             locus_out, ctx);
    if (sens_cmd->parsed())
        return cmd_sensitivity(sens_opts, sens_var, sens_from, sens_to, sens_steps,
                               sens_eig, sens_coords, sens_out, ctx);
    if (certify_cmd->parsed()) {
        if (point_cmd->parsed())
            return cmd_certify_point(point_opts, point_at, point_z, point_out, ctx);
        if (box_cmd->parsed())
            return cmd_certify_box(box_opts, box_file, box_z, box_out, threads, ctx);
        if (grow_cmd->parsed())
            return cmd_certify_grow(grow_opts, grow_center, grow_weights, grow_tol,
                                    grow_z, grow_out, threads, ctx);
    }
    if (scan_cmd->parsed())
        return cmd_scan(scan_opts, scan_grid_text, scan_modes, scan_z, scan_out,
                        threads, ctx);
    if (area_cmd->parsed())
        return cmd_area(area_opts, area_centers, area_pm, area_hw, area_samples,
                        area_seed, area_out, threads, ctx);
    if (rerun_cmd->parsed()) return cmd_rerun(rerun_manifest);
    return kExitError;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    try {
        return dispatch(args);
    } catch (const mudae::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitError;
    }
}
