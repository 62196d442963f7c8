#include "craft/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "craft/checkpoint.hpp"
#include "craft/dataset.hpp"
#include "craft/error.hpp"
#include "craft/eval.hpp"
#include "craft/knn.hpp"
#include "craft/pca.hpp"
#include "craft/recommend.hpp"
#include "craft/synthetic.hpp"
#include "craft/train.hpp"

namespace craft {

namespace {

using nlohmann::json;

/// Relative output paths land in $CRAFT_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
    const char* dir = std::getenv("CRAFT_OUT_DIR");
    if (!dir || !*dir || path.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(dir) / path).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

/// CSV artifacts keep their pinned header contract; the resolved config
/// goes to a .meta.json sidecar instead.
void write_csv_with_meta(const std::string& path, const std::string& csv, const json& config) {
    write_text(path, csv);
    write_text(path + ".meta.json", config.dump(2) + "\n");
}

SyntheticSpec load_spec_arg(const std::string& arg) {
    for (const auto& name : synthetic_preset_names())
        if (arg == name) return synthetic_preset(name);
    return spec_load(arg);
}

PairDataset load_data_arg(const std::string& path, std::size_t csv_d_s, std::size_t csv_d_t) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        if (csv_d_s == 0 || csv_d_t == 0)
            throw ValidationError("loading a CSV dataset requires --d-s and --d-t");
        return dataset_from_csv(path, csv_d_s, csv_d_t);
    }
    return dataset_load(path);
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            out.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw ValidationError("bad number '" + field + "' in query vector");
        }
    }
    if (out.empty()) throw ValidationError("empty query vector");
    return out;
}

std::vector<double> resolve_query(const std::string& query_csv, long long query_row,
                                  const PairDataset* data, std::size_t want_dim) {
    std::vector<double> q;
    if (!query_csv.empty()) {
        q = parse_vector(query_csv);
    } else if (query_row >= 0) {
        if (!data) throw ValidationError("--query-row requires --data");
        if (static_cast<std::size_t>(query_row) >= data->n())
            throw ValidationError("--query-row out of range");
        auto row = data->sources.row(static_cast<std::size_t>(query_row));
        q.assign(row.begin(), row.end());
    } else {
        throw ValidationError("give a query via --query or --query-row");
    }
    if (q.size() != want_dim)
        throw DimensionError("query has dim " + std::to_string(q.size()) + ", model wants " +
                             std::to_string(want_dim));
    return q;
}

// --------------------------------------------------------------- train ----

json train_config_json(const TrainConfig& cfg, const std::string& data_path,
                       std::size_t epochs) {
    json j;
    j["subcommand"] = "train";
    j["data"] = data_path;
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"] = cfg.batch_size;
    j["epochs"] = epochs;
    j["d_z"] = cfg.d_z;
    j["leaky_alpha"] = cfg.leaky_alpha;
    j["real_label"] = cfg.real_label;
    j["seed"] = cfg.rng_seed;
    j["d_steps_per_t_step"] = cfg.d_steps_per_t_step;
    j["non_saturating_t_loss"] = cfg.non_saturating_t_loss;
    j["lr_hold_fraction"] = cfg.lr_hold_fraction;
    return j;
}

int cmd_gen_data(const std::string& spec_arg, std::size_t n, std::uint64_t seed,
                 const std::string& out_arg, std::string name) {
    SyntheticSpec spec = load_spec_arg(spec_arg);
    if (name.empty()) name = spec_arg;
    Rng rng(seed);
    PairDataset ds = synth_generate(spec, n, rng);
    ds.name = name;
    ds.creation_seed = seed;
    json cfg;
    cfg["subcommand"] = "gen-data";
    cfg["spec"] = spec_arg;
    cfg["spec_resolved"] = json::parse(spec_to_json(spec));
    cfg["n"] = n;
    cfg["seed"] = seed;
    cfg["name"] = name;
    ds.config_echo = cfg.dump(2);
    const std::string out = resolve_out(out_arg);
    dataset_save(ds, out);
    std::cout << "dataset: N=" << ds.n() << " d_s=" << ds.d_s() << " d_t=" << ds.d_t()
              << " seed=" << seed << " -> " << out << "\n";
    return 0;
}

int cmd_train(const std::string& data_path, std::size_t csv_d_s, std::size_t csv_d_t,
              const std::string& out_arg, std::string curve_arg, const TrainConfig& cfg) {
    PairDataset data = load_data_arg(data_path, csv_d_s, csv_d_t);
    json cfg_json = train_config_json(cfg, data_path, cfg.epochs);
    std::cout << "config: " << cfg_json.dump() << "\n";

    TrainResult result = train(data, cfg);

    const std::string out = resolve_out(out_arg);
    Checkpoint ckpt{std::move(result.phi), std::move(result.theta), cfg_json.dump(2)};
    checkpoint_save(ckpt, out);

    if (curve_arg.empty()) curve_arg = out_arg + ".loss.csv";
    const std::string curve = resolve_out(curve_arg);
    std::ostringstream csv;
    csv.precision(17);
    csv << "step,d_loss,t_loss\n";
    for (std::size_t i = 0; i < result.history.d_values.size(); ++i)
        csv << i << ',' << result.history.d_values[i] << ',' << result.history.t_values[i]
            << '\n';
    write_csv_with_meta(curve, csv.str(), cfg_json);

    std::cout << "checkpoint: " << out << " (" << result.history.d_values.size()
              << " steps) curve: " << curve << "\n";
    return 0;
}

int cmd_index(const std::string& data_path, std::size_t csv_d_s, std::size_t csv_d_t,
              const std::string& out_arg) {
    PairDataset data = load_data_arg(data_path, csv_d_s, csv_d_t);
    KnnIndex index = index_build(data.targets, data.item_ids);
    json cfg;
    cfg["subcommand"] = "index";
    cfg["data"] = data_path;
    index.config_echo = cfg.dump(2);
    const std::string out = resolve_out(out_arg);
    index_save(index, out);
    std::cout << "index: M=" << index.size() << " d_t=" << index.dim() << " -> " << out << "\n";
    return 0;
}

int cmd_recommend(const std::string& ckpt_path, const std::string& index_path,
                  const std::string& data_path, std::size_t csv_d_s, std::size_t csv_d_t,
                  const std::string& query_csv, long long query_row, std::size_t n_samples,
                  std::size_t k_per_sample, std::uint64_t seed, const std::string& out_arg) {
    Checkpoint ckpt = checkpoint_load(ckpt_path);

    std::optional<PairDataset> data;
    if (!data_path.empty()) data = load_data_arg(data_path, csv_d_s, csv_d_t);

    KnnIndex index;
    if (!index_path.empty()) {
        index = index_load(index_path);
    } else if (data) {
        index = index_build(data->targets, data->item_ids);
    } else {
        throw ValidationError("give a catalog via --index or --data");
    }

    const auto query =
        resolve_query(query_csv, query_row, data ? &*data : nullptr, ckpt.phi.d_s);

    Rng rng(seed);
    auto hits = recommend(ckpt.phi, index, query, n_samples, k_per_sample, rng);

    std::ostringstream csv;
    csv.precision(17);
    csv << "rank,id,distance\n";
    for (std::size_t i = 0; i < hits.size(); ++i)
        csv << i + 1 << ',' << hits[i].id << ',' << hits[i].distance << '\n';
    std::cout << csv.str();

    if (!out_arg.empty()) {
        json cfg;
        cfg["subcommand"] = "recommend";
        cfg["checkpoint"] = ckpt_path;
        cfg["index"] = index_path;
        cfg["data"] = data_path;
        cfg["n_samples"] = n_samples;
        cfg["k_per_sample"] = k_per_sample;
        cfg["seed"] = seed;
        write_csv_with_meta(resolve_out(out_arg), csv.str(), cfg);
    }
    return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& data_path, std::size_t csv_d_s,
                 std::size_t csv_d_t, const std::string& spec_arg, const EvalOptions& options,
                 const std::string& out_arg, const std::string& format) {
    Checkpoint ckpt = checkpoint_load(ckpt_path);
    PairDataset data = load_data_arg(data_path, csv_d_s, csv_d_t);

    std::optional<SyntheticSpec> spec;
    if (!spec_arg.empty()) {
        spec = load_spec_arg(spec_arg);
    } else {
        std::cerr << "warning: no --spec given; oracle metrics are omitted\n";
    }

    json cfg;
    cfg["subcommand"] = "evaluate";
    cfg["checkpoint"] = ckpt_path;
    cfg["data"] = data_path;
    cfg["spec"] = spec_arg;
    cfg["n_queries"] = options.n_queries;
    cfg["density_k"] = options.density_k;
    cfg["n_recommend"] = options.n_recommend;
    cfg["n_samples"] = options.n_samples;
    cfg["seed"] = options.seed;
    cfg["format"] = format;

    EvalReport report = evaluate(ckpt.phi, ckpt.theta, data, spec, options);
    report.config_echo = cfg.dump(2);

    const std::string out = resolve_out(out_arg);
    if (format == "json") {
        write_text(out, report_to_json(report) + "\n");
    } else {
        write_csv_with_meta(out, report_to_csv(report), cfg);
    }
    std::cout << "report: " << report.cells.size() << " cells -> " << out << "\n";
    return 0;
}

int cmd_score_map(const std::string& ckpt_path, const std::string& data_path,
                  std::size_t csv_d_s, std::size_t csv_d_t, const std::string& query_csv,
                  long long query_row, const std::string& out_arg, const std::string& format) {
    Checkpoint ckpt = checkpoint_load(ckpt_path);
    PairDataset data = load_data_arg(data_path, csv_d_s, csv_d_t);
    const auto query = resolve_query(query_csv, query_row, &data, ckpt.phi.d_s);

    KnnIndex catalog = index_build(data.targets, data.item_ids);
    PcaProjection proj = pca_fit(catalog.features, 2);
    auto rows = score_map(ckpt.theta, query, catalog, proj);

    json cfg;
    cfg["subcommand"] = "score-map";
    cfg["checkpoint"] = ckpt_path;
    cfg["data"] = data_path;
    cfg["query_row"] = query_row;
    cfg["query"] = query_csv;
    cfg["format"] = format;

    const std::string out = resolve_out(out_arg);
    if (format == "json") {
        json j;
        j["config"] = cfg;
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"id", r.id}, {"x", r.x}, {"y", r.y}, {"score", r.score}});
        write_text(out, j.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv.precision(17);
        csv << "id,x,y,score\n";
        for (const auto& r : rows)
            csv << r.id << ',' << r.x << ',' << r.y << ',' << r.score << '\n';
        write_csv_with_meta(out, csv.str(), cfg);
    }
    std::cout << "score map: " << rows.size() << " items -> " << out << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("craft");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"CRAFT: adversarial feature transformer for complementary recommendation"};
    app.require_subcommand(1);

    // ---- gen-data ----
    auto* gen = app.add_subcommand("gen-data", "sample a synthetic pair dataset");
    std::string gen_spec, gen_out, gen_name;
    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec,--preset", gen_spec, "preset name or spec JSON path")->required();
    gen->add_option("--n", gen_n, "number of pairs")->required()
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--out", gen_out, "output dataset path")->required();
    gen->add_option("--name", gen_name, "dataset name (default: spec argument)");

    // ---- train ----
    auto* tr = app.add_subcommand("train", "train the adversarial feature transformer");
    std::string tr_data, tr_out, tr_curve;
    std::size_t tr_ds = 0, tr_dt = 0;
    TrainConfig tr_cfg;
    tr->add_option("--data", tr_data, "dataset path (.bin container or .csv)")->required();
    tr->add_option("--d-s", tr_ds, "source dim (CSV input only)");
    tr->add_option("--d-t", tr_dt, "target dim (CSV input only)");
    tr->add_option("--out", tr_out, "output checkpoint path")->required();
    tr->add_option("--curve", tr_curve, "loss-curve CSV path (default: <out>.loss.csv)");
    tr->add_option("--epochs", tr_cfg.epochs, "training epochs")->required();
    tr->add_option("--batch-size", tr_cfg.batch_size, "minibatch size", true);
    tr->add_option("--lr", tr_cfg.learning_rate, "starting learning rate", true);
    tr->add_option("--d-z", tr_cfg.d_z, "noise dimension", true);
    tr->add_option("--alpha", tr_cfg.leaky_alpha, "leaky ReLU slope", true);
    tr->add_option("--real-label", tr_cfg.real_label, "one-sided label smoothing", true);
    tr->add_option("--seed", tr_cfg.rng_seed, "rng seed");
    tr->add_option("--d-steps", tr_cfg.d_steps_per_t_step, "D updates per T update", true);
    tr->add_flag("--non-saturating", tr_cfg.non_saturating_t_loss,
                 "T-step descends -log D instead of log(1-D)");
    tr->add_option("--lr-hold", tr_cfg.lr_hold_fraction,
                   "fraction of steps at constant lr before linear decay to 0", true);

    // ---- index ----
    auto* ix = app.add_subcommand("index", "build a nearest-neighbor index file");
    std::string ix_data, ix_out;
    std::size_t ix_ds = 0, ix_dt = 0;
    ix->add_option("--data", ix_data, "dataset path")->required();
    ix->add_option("--d-s", ix_ds, "source dim (CSV input only)");
    ix->add_option("--d-t", ix_dt, "target dim (CSV input only)");
    ix->add_option("--out", ix_out, "output index path")->required();

    // ---- recommend ----
    auto* rec = app.add_subcommand("recommend", "rank complementary catalog items for a query");
    std::string rec_ckpt, rec_index, rec_data, rec_query, rec_out;
    std::size_t rec_ds = 0, rec_dt = 0, rec_nsamples = 17, rec_k = 1;
    long long rec_row = -1;
    std::uint64_t rec_seed = 0;
    rec->add_option("--checkpoint", rec_ckpt, "trained checkpoint")->required();
    rec->add_option("--index", rec_index, "index file");
    rec->add_option("--data", rec_data, "dataset path (catalog and/or query rows)");
    rec->add_option("--d-s", rec_ds, "source dim (CSV input only)");
    rec->add_option("--d-t", rec_dt, "target dim (CSV input only)");
    rec->add_option("--query", rec_query, "query source vector, comma separated");
    rec->add_option("--query-row", rec_row, "row of --data to use as the query");
    rec->add_option("--n-samples", rec_nsamples, "noise draws", true);
    rec->add_option("--k", rec_k, "neighbors per draw", true);
    rec->add_option("--seed", rec_seed, "rng seed");
    rec->add_option("--out", rec_out, "also write the ranking as CSV");

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "per-algorithm, per-density-bin report");
    std::string ev_ckpt, ev_data, ev_spec, ev_out, ev_format = "json";
    std::size_t ev_ds = 0, ev_dt = 0;
    EvalOptions ev_opt;
    ev->add_option("--checkpoint", ev_ckpt, "trained checkpoint")->required();
    ev->add_option("--data", ev_data, "dataset path")->required();
    ev->add_option("--d-s", ev_ds, "source dim (CSV input only)");
    ev->add_option("--d-t", ev_dt, "target dim (CSV input only)");
    ev->add_option("--spec", ev_spec, "oracle spec (preset name or JSON path)");
    ev->add_option("--k", ev_opt.density_k, "density neighbors", true);
    ev->add_option("--n-queries", ev_opt.n_queries, "evaluation queries", true);
    ev->add_option("--n-rec", ev_opt.n_recommend, "items per query per algorithm", true);
    ev->add_option("--n-samples", ev_opt.n_samples, "noise draws for craft", true);
    ev->add_option("--seed", ev_opt.seed, "rng seed");
    ev->add_option("--out", ev_out, "output report path")->required();
    ev->add_option("--format", ev_format, "csv|json", true)
        ->check(CLI::IsMember({"csv", "json"}));

    // ---- score-map ----
    auto* sm = app.add_subcommand("score-map", "discriminator scores over the catalog");
    std::string sm_ckpt, sm_data, sm_query, sm_out, sm_format = "csv";
    std::size_t sm_ds = 0, sm_dt = 0;
    long long sm_row = -1;
    sm->add_option("--checkpoint", sm_ckpt, "trained checkpoint")->required();
    sm->add_option("--data", sm_data, "dataset path (the catalog)")->required();
    sm->add_option("--d-s", sm_ds, "source dim (CSV input only)");
    sm->add_option("--d-t", sm_dt, "target dim (CSV input only)");
    sm->add_option("--query", sm_query, "query source vector, comma separated");
    sm->add_option("--query-row", sm_row, "row of --data to use as the query");
    sm->add_option("--out", sm_out, "output path")->required();
    sm->add_option("--format", sm_format, "csv|json", true)
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_spec, gen_n, gen_seed, gen_out, gen_name);
        if (tr->parsed()) return cmd_train(tr_data, tr_ds, tr_dt, tr_out, tr_curve, tr_cfg);
        if (ix->parsed()) return cmd_index(ix_data, ix_ds, ix_dt, ix_out);
        if (rec->parsed())
            return cmd_recommend(rec_ckpt, rec_index, rec_data, rec_ds, rec_dt, rec_query,
                                 rec_row, rec_nsamples, rec_k, rec_seed, rec_out);
        if (ev->parsed())
            return cmd_evaluate(ev_ckpt, ev_data, ev_ds, ev_dt, ev_spec, ev_opt, ev_out,
                                ev_format);
        if (sm->parsed())
            return cmd_score_map(sm_ckpt, sm_data, sm_ds, sm_dt, sm_query, sm_row, sm_out,
                                 sm_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

}  // namespace craft
