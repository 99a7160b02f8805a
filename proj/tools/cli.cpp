#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "baqca/assessment.hpp"
#include "baqca/dataset.hpp"
#include "baqca/error.hpp"
#include "baqca/minimize.hpp"
#include "baqca/random_gen.hpp"
#include "baqca/recommend.hpp"
#include "baqca/report.hpp"
#include "baqca/study.hpp"
#include "baqca/truth_table.hpp"
#include "baqca/version.hpp"

namespace fs = std::filesystem;

namespace baqca::cli {

namespace {

struct DataFlags {
    std::string data;
    std::string outcome;
    std::string id;
    bool negate = false;
    std::vector<std::string> dichotomize;
    std::vector<std::string> presence;
};

struct ChoiceFlags {
    double consistency = 0.85;
    std::uint32_t conf_n = 1;
    std::string solution = "complex";
};

struct RunFlags {
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    bool json = false;
    std::string output;
};

void add_data_flags(CLI::App* sub, DataFlags& f) {
    sub->add_option("--data", f.data, "CSV file of cases")->required()->check(CLI::ExistingFile);
    sub->add_option("--outcome", f.outcome, "outcome column")->required();
    sub->add_option("--id", f.id, "case id column");
    sub->add_flag("--negate", f.negate, "analyse the absence of the outcome");
    sub->add_option("--dichotomize-mean", f.dichotomize, "columns coded 1 at or above their mean")->delimiter(',');
    sub->add_option("--presence", f.presence, "COL=THRESHOLD, coded 1 at or above the threshold");
}

void add_choice_flags(CLI::App* sub, ChoiceFlags& f) {
    sub->add_option("--consistency", f.consistency, "consistency threshold")
        ->capture_default_str()
        ->envname("BAQCA_CONSISTENCY")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--conf-n", f.conf_n, "configurational N threshold")
        ->capture_default_str()
        ->envname("BAQCA_CONF_N")
        ->check(CLI::PositiveNumber);
    sub->add_option("--solution", f.solution, "complex or parsimonious")
        ->capture_default_str()
        ->check(CLI::IsMember({"complex", "parsimonious"}));
}

void add_run_flags(CLI::App* sub, RunFlags& f, bool with_seed = true) {
    if (with_seed) sub->add_option("--seed", f.seed, "random seed (drawn from the OS when omitted)")->envname("BAQCA_SEED");
    sub->add_option("--threads", f.threads, "worker threads, 0 for all cores")->capture_default_str()->envname("BAQCA_THREADS");
    sub->add_flag("--json", f.json, "print JSON instead of tables");
    sub->add_option("--output", f.output, "also write the JSON report here");
}

CodingRules coding_rules(const DataFlags& f) {
    CodingRules rules;
    rules.dichotomize_at_mean = f.dichotomize;
    for (const auto& p : f.presence) {
        const auto eq = p.rfind('=');
        if (eq == std::string::npos || eq == 0) throw InputError(fmt::format("--presence expects COL=THRESHOLD, got '{}'", p));
        std::size_t used = 0;
        double thr = 0.0;
        try {
            thr = std::stod(p.substr(eq + 1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != p.size() - eq - 1 || !std::isfinite(thr))
            throw InputError(fmt::format("--presence threshold in '{}' is not a number", p));
        rules.presence.emplace_back(p.substr(0, eq), thr);
    }
    return rules;
}

CaseMatrix load_data(const DataFlags& f) {
    CaseMatrix data = load_csv(f.data, f.outcome, f.id.empty() ? std::nullopt : std::optional<std::string>(f.id),
                               coding_rules(f));
    return f.negate ? negate_outcome(data) : data;
}

std::uint64_t resolve_seed(const RunFlags& f, std::ostream& err) {
    if (f.seed) return *f.seed;
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << seed << '\n';
    return seed;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read '{}'", path));
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw InputError(fmt::format("error writing '{}'", path.string()));
}

// Everything needed to rerun a command, kept beside its outputs so the
// outputs themselves stay byte-identical between runs.
class Manifest {
public:
    Manifest(const CLI::App* sub, std::vector<std::string> args) : sub_(sub), args_(std::move(args)), started_(utc_now()) {}

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void add_input(const std::string& path) { inputs_.push_back(path); }
    void add_output(const fs::path& path) { outputs_.push_back(path.string()); }

    void write(const fs::path& path) const {
        Json flags = Json::object();
        for (const CLI::Option* opt : sub_->get_options()) {
            if (opt->get_name() == "--help") continue;
            const std::string name = opt->get_name(false, true);
            if (opt->count() > 0) {
                const auto& res = opt->results();
                flags[name] = res.size() == 1 ? Json(res.front()) : Json(res);
            } else if (!opt->get_envname().empty() && std::getenv(opt->get_envname().c_str())) {
                flags[name] = std::getenv(opt->get_envname().c_str());
            } else {
                flags[name] = opt->get_default_str();
            }
        }
        Json inputs = Json::array();
        for (const auto& p : inputs_) inputs.push_back(Json{{"path", p}, {"sha256", sha256_file(p)}});
        Json m{{"tool", "baqca"},
               {"version", kVersion},
               {"command", sub_->get_name()},
               {"argv", args_},
               {"flags", flags},
               {"seed", seed_ ? Json(*seed_) : Json(nullptr)},
               {"inputs", inputs},
               {"outputs", outputs_},
               {"started_at", started_},
               {"finished_at", utc_now()}};
        write_file(path, m.dump(2) + "\n");
    }

private:
    const CLI::App* sub_;
    std::vector<std::string> args_;
    std::string started_;
    std::optional<std::uint64_t> seed_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
};

fs::path manifest_beside(const fs::path& file) { return fs::path(file.string() + ".manifest.json"); }

// ---------------------------------------------------------------- qca

struct QcaFlags {
    DataFlags data;
    ChoiceFlags choice;
    RunFlags run;
    std::string truth_table;
};

int cmd_qca(const QcaFlags& f, Manifest& manifest, std::ostream& out, std::ostream& err) {
    const CaseMatrix data = load_data(f.data);
    manifest.add_input(f.data.data);
    const Thresholds thresholds{f.choice.consistency, f.choice.conf_n};
    const SolutionMode mode = parse_solution_mode(f.choice.solution);
    const TruthTable table = build_truth_table(data, thresholds);
    const auto solution = solve(table, mode, data);

    Json j{{"outcome", data.outcome_name()}, {"negated", f.data.negate}, {"n", data.num_cases()}};
    if (solution) {
        j["result"] = to_json(*solution);
        j["reason"] = nullptr;
    } else {
        j["result"] = nullptr;
        j["reason"] = describe(*minimize(table, mode).reason);
    }
    j["truth_table"] = to_json(table);

    std::vector<fs::path> written;
    if (!f.truth_table.empty()) {
        write_file(f.truth_table, table.to_csv());
        written.push_back(f.truth_table);
    }
    if (!f.run.output.empty()) {
        write_file(f.run.output, j.dump(2) + "\n");
        written.push_back(f.run.output);
    }
    for (const auto& p : written) manifest.add_output(p);
    for (const auto& p : written) manifest.write(manifest_beside(p));

    if (f.run.json)
        out << j.dump(2) << '\n';
    else if (solution)
        out << format_solution_table(*solution, fmt::format("Solutions for {}{}", f.data.negate ? "~" : "", data.outcome_name()));
    if (!solution) {
        err << "no result: " << j["reason"].get<std::string>() << '\n';
        return kNoResult;
    }
    return kOk;
}

// ---------------------------------------------------------------- assess

struct AssessFlags {
    DataFlags data;
    ChoiceFlags choice;
    RunFlags run;
    std::size_t sims = 2000;
    std::size_t boot = 1000;
    double level = 0.95;
    std::string null_kind = "bernoulli";
    std::optional<double> after_consistency;
    std::optional<std::uint32_t> after_conf_n;
    bool trace = false;
    std::string dump_null;
};

int cmd_assess(const AssessFlags& f, Manifest& manifest, std::ostream& out, std::ostream& err) {
    if (f.after_consistency.has_value() != f.after_conf_n.has_value())
        throw InputError("--after-consistency and --after-conf-n go together");
    const CaseMatrix data = load_data(f.data);
    manifest.add_input(f.data.data);
    const std::uint64_t seed = resolve_seed(f.run, err);
    manifest.set_seed(seed);

    AssessSettings s;
    s.thresholds = Thresholds{f.choice.consistency, f.choice.conf_n};
    s.thresholds.validate();
    s.mode = parse_solution_mode(f.choice.solution);
    s.sims = f.sims;
    s.boot = f.boot;
    s.level = f.level;
    s.seed = seed;
    s.threads = f.run.threads;
    const bool permute = f.null_kind == "permute";
    auto run = [&](const AssessSettings& settings) {
        return permute ? assess_permutation(data, settings) : assess(marginal_profile(data), settings);
    };

    std::vector<BaqcaReport> reports{run(s)};
    if (f.after_consistency) {
        AssessSettings after = s;
        after.thresholds = Thresholds{*f.after_consistency, *f.after_conf_n};
        after.thresholds.validate();
        reports.push_back(run(after));
    }

    std::vector<fs::path> written;
    if (!f.dump_null.empty()) {
        const CaseMatrix null0 = permute ? permute_columns(data, seed, 0)
                                         : generate_dataset(NullModel{marginal_profile(data), seed}, 0, data.condition_names());
        write_file(f.dump_null, to_csv(null0, false));
        written.push_back(f.dump_null);
    }

    Json j{{"outcome", data.outcome_name()}, {"negated", f.data.negate}};
    j["assessment"] = to_json(reports[0], f.trace);
    j["after"] = reports.size() > 1 ? to_json(reports[1], f.trace) : Json(nullptr);
    if (!f.run.output.empty()) {
        write_file(f.run.output, j.dump(2) + "\n");
        written.push_back(f.run.output);
    }
    for (const auto& p : written) manifest.add_output(p);
    for (const auto& p : written) manifest.write(manifest_beside(p));

    if (f.run.json) {
        out << j.dump(2) << '\n';
    } else {
        std::vector<AssessmentRow> rows;
        for (const auto& r : reports)
            rows.push_back({fmt::format("Solution set at {} / {}", r.settings.thresholds.consistency,
                                        r.settings.thresholds.conf_n),
                            &r});
        out << format_assessment_table(rows);
    }
    return kOk;
}

// ---------------------------------------------------------------- recommend

struct RecommendFlags {
    DataFlags data;
    RunFlags run;
    std::string solution = "complex";
    std::vector<double> alphas{0.10, 0.05, 0.01, 0.001};
    std::size_t sims = 2000;
    std::string model = "interaction";
    double step = 0.05;
    std::uint32_t max_conf_n = 6;
    std::string table_csv;
    std::string plot_csv;
};

int cmd_recommend(const RecommendFlags& f, Manifest& manifest, std::ostream& out, std::ostream& err) {
    const CaseMatrix data = load_data(f.data);
    manifest.add_input(f.data.data);
    const std::uint64_t seed = resolve_seed(f.run, err);
    manifest.set_seed(seed);

    RecommendSettings s;
    s.mode = parse_solution_mode(f.solution);
    s.alphas = f.alphas;
    s.sims = f.sims;
    s.seed = seed;
    s.threads = f.run.threads;
    s.model = parse_recommend_model(f.model);
    s.grid.consistency_step = f.step;
    s.grid.conf_n_hi = f.max_conf_n;
    const RecommendResult result = recommend(marginal_profile(data), s);

    std::vector<fs::path> written;
    if (!f.table_csv.empty()) {
        write_file(f.table_csv, recommendation_csv(result));
        written.push_back(f.table_csv);
    }
    if (!f.plot_csv.empty()) {
        write_file(f.plot_csv, recommendation_plot_csv(result));
        written.push_back(f.plot_csv);
    }
    const Json j = to_json(result);
    if (!f.run.output.empty()) {
        write_file(f.run.output, j.dump(2) + "\n");
        written.push_back(f.run.output);
    }
    for (const auto& p : written) manifest.add_output(p);
    for (const auto& p : written) manifest.write(manifest_beside(p));

    if (f.run.json)
        out << j.dump(2) << '\n';
    else
        out << format_recommendations(result);
    return kOk;
}

// ---------------------------------------------------------------- study

struct StudyFlags {
    RunFlags run;
    std::size_t iterations = 100'000;
    std::pair<int, int> conditions{1, 6};
    std::optional<int> max_conditions;
    std::pair<int, int> sample_size{10, 60};
    std::pair<double, double> prob{0.1, 0.9};
    std::pair<double, double> consistency{0.5, 1.0};
    std::pair<int, int> conf_n{1, 6};
    std::string solutions = "both";
    bool factorial = false;
    double factorial_step = 0.05;
    std::string out_dir;
    std::string refit;
};

int cmd_study(const StudyFlags& f, Manifest& manifest, std::ostream& out, std::ostream& err) {
    StudyConfig config;
    config.iterations = f.iterations;
    config.structure.conditions = {f.conditions.first, f.max_conditions.value_or(f.conditions.second)};
    config.structure.sample_size = {f.sample_size.first, f.sample_size.second};
    config.structure.probability = {f.prob.first, f.prob.second};
    config.consistency = {f.consistency.first, f.consistency.second};
    config.conf_n = {f.conf_n.first, f.conf_n.second};
    if (f.solutions == "complex")
        config.complex_solution = {1, 1};
    else if (f.solutions == "parsimonious")
        config.complex_solution = {0, 0};
    config.factorial = f.factorial;
    config.factorial_consistency_step = f.factorial_step;
    config.threads = f.run.threads;
    config.validate();

    const fs::path dir = f.out_dir;
    fs::create_directories(dir);
    std::vector<StudyRecord> records;
    std::vector<fs::path> written;
    if (!f.refit.empty()) {
        records = read_records_csv(f.refit);
        manifest.add_input(f.refit);
    } else {
        config.seed = resolve_seed(f.run, err);
        manifest.set_seed(config.seed);
        const fs::path path = dir / "records.csv";
        std::ofstream rec(path, std::ios::binary);
        if (!rec) throw InputError(fmt::format("cannot write '{}'", path.string()));
        rec << record_csv_header();
        records = run_study(config, [&](std::span<const StudyRecord> block) {
            for (const auto& r : block) rec << record_csv_line(r);
            rec.flush();
        });
        written.push_back(path);
    }

    const StudyModels models = fit_models(records);
    for (const auto& w : models.warnings) err << "warning: " << w << '\n';
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        written.push_back(dir / name);
    };
    emit("model1.csv", summary_csv(models.model1));
    emit("model2.csv", summary_csv(models.model2));
    emit("models.txt", format_models_table(models));
    const Json j = to_json(models);
    emit("models.json", j.dump(2) + "\n");
    for (const auto& set : standard_curves(models, config)) emit("curves_" + set.name + ".csv", curves_csv(set.points, set.name));
    if (!f.run.output.empty()) {
        write_file(f.run.output, j.dump(2) + "\n");
        written.push_back(f.run.output);
    }
    for (const auto& p : written) manifest.add_output(p);
    manifest.write(dir / "manifest.json");

    std::size_t spurious = 0;
    for (const auto& r : records) spurious += r.spurious;
    if (f.run.json) {
        out << j.dump(2) << '\n';
    } else {
        out << fmt::format("{} records, {} spurious ({:.4f})\n\n", records.size(), spurious,
                           records.empty() ? 0.0 : static_cast<double>(spurious) / records.size());
        out << format_models_table(models);
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Crisp-set QCA with simulation-based robustness assessment", "baqca"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    QcaFlags qf;
    auto* qca = app.add_subcommand("qca", "minimize a truth table and report solutions");
    add_data_flags(qca, qf.data);
    add_choice_flags(qca, qf.choice);
    add_run_flags(qca, qf.run, false);
    qca->add_option("--truth-table", qf.truth_table, "write the truth table CSV here");

    AssessFlags af;
    auto* as = app.add_subcommand("assess", "probability that the setup returns a result from random data");
    add_data_flags(as, af.data);
    add_choice_flags(as, af.choice);
    add_run_flags(as, af.run);
    as->add_option("--sims", af.sims, "simulated datasets")->capture_default_str()->envname("BAQCA_SIMS")->check(CLI::PositiveNumber);
    as->add_option("--boot", af.boot, "bootstrap resamples")->capture_default_str()->envname("BAQCA_BOOT")->check(CLI::PositiveNumber);
    as->add_option("--level", af.level, "confidence level")->capture_default_str()->check(CLI::Range(0.5, 0.9999));
    as->add_option("--null", af.null_kind, "bernoulli or permute")->capture_default_str()->check(CLI::IsMember({"bernoulli", "permute"}));
    as->add_option("--after-consistency", af.after_consistency, "also assess at this consistency threshold");
    as->add_option("--after-conf-n", af.after_conf_n, "also assess at this configurational N threshold");
    as->add_flag("--trace", af.trace, "include the per-simulation indicator trace in JSON");
    as->add_option("--dump-null", af.dump_null, "write the first simulated dataset as CSV");

    RecommendFlags rf;
    auto* rc = app.add_subcommand("recommend", "minimum consistency per configurational N for target alphas");
    add_data_flags(rc, rf.data);
    add_run_flags(rc, rf.run);
    rc->add_option("--solution", rf.solution, "complex or parsimonious")->capture_default_str()->check(CLI::IsMember({"complex", "parsimonious"}));
    rc->add_option("--alpha", rf.alphas, "target probabilities")->delimiter(',')->capture_default_str();
    rc->add_option("--sims", rf.sims, "simulated datasets")->capture_default_str()->envname("BAQCA_SIMS")->check(CLI::PositiveNumber);
    rc->add_option("--model", rf.model, "interaction or main-effects")->capture_default_str()->check(CLI::IsMember({"interaction", "main-effects"}));
    rc->add_option("--step", rf.step, "consistency grid step")->capture_default_str();
    rc->add_option("--max-conf-n", rf.max_conf_n, "largest configurational N in the grid")->capture_default_str();
    rc->add_option("--table-csv", rf.table_csv, "write recommendation tables as CSV");
    rc->add_option("--plot-csv", rf.plot_csv, "write fitted grid for plotting");

    StudyFlags sf;
    auto* st = app.add_subcommand("study", "Monte Carlo sweep of data structure and researcher choice");
    add_run_flags(st, sf.run);
    st->add_option("--iterations", sf.iterations, "simulated datasets")->capture_default_str()->envname("BAQCA_ITERATIONS")->check(CLI::PositiveNumber);
    st->add_option("--conditions", sf.conditions, "LO HI number of conditions")->capture_default_str();
    st->add_option("--max-conditions", sf.max_conditions, "shorthand for the upper condition count");
    st->add_option("--sample-size", sf.sample_size, "LO HI cases per dataset")->capture_default_str();
    st->add_option("--prob", sf.prob, "LO HI shared marginal probability")->capture_default_str();
    st->add_option("--consistency-range", sf.consistency, "LO HI consistency threshold")->capture_default_str();
    st->add_option("--conf-n-range", sf.conf_n, "LO HI configurational N threshold")->capture_default_str();
    st->add_option("--solutions", sf.solutions, "both, complex or parsimonious")->capture_default_str()->check(CLI::IsMember({"both", "complex", "parsimonious"}));
    st->add_flag("--factorial", sf.factorial, "every dataset at every grid combination");
    st->add_option("--factorial-step", sf.factorial_step, "consistency step for --factorial")->capture_default_str();
    st->add_option("--out-dir", sf.out_dir, "directory for records, models and curves")->required();
    st->add_option("--refit", sf.refit, "fit models to an existing records CSV instead of simulating")->check(CLI::ExistingFile);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (qca->parsed()) {
            Manifest m(qca, args);
            return cmd_qca(qf, m, out, err);
        }
        if (as->parsed()) {
            Manifest m(as, args);
            return cmd_assess(af, m, out, err);
        }
        if (rc->parsed()) {
            Manifest m(rc, args);
            return cmd_recommend(rf, m, out, err);
        }
        Manifest m(st, args);
        return cmd_study(sf, m, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace baqca::cli
