// Command-line surface for the transform/defense pipeline: dataset
// preparation, kernel and classifier training, attack generation, defense
// application, spectral analysis and grid evaluation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "saak/analysis.hpp"
#include "saak/attack.hpp"
#include "saak/binary_io.hpp"
#include "saak/classifier.hpp"
#include "saak/dataset.hpp"
#include "saak/filtering.hpp"
#include "saak/kernels.hpp"
#include "saak/parallel.hpp"
#include "saak/smoothing.hpp"
#include "saak/synthetic.hpp"
#include "saak/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs,
                                    const std::string& extension) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == extension)
                    files.push_back(e.path());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw std::runtime_error("input not found: " + in);
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no " + extension + " inputs found");
    return files;
}

saak::LabeledImages load_batches(const std::vector<std::string>& inputs) {
    saak::LabeledImages all;
    for (const auto& f : expand_inputs(inputs, ".bin")) {
        auto part = saak::load_cifar10_batch(f);
        std::move(part.images.begin(), part.images.end(), std::back_inserter(all.images));
        all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
    }
    return all;
}

// optional class subset; labels are remapped to the index within `classes`
void filter_classes(saak::LabeledImages& data, const std::vector<int>& classes) {
    if (classes.empty()) return;
    std::map<int, int> remap;
    for (std::size_t i = 0; i < classes.size(); ++i) remap[classes[i]] = static_cast<int>(i);
    saak::LabeledImages kept;
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        auto it = remap.find(data.labels[i]);
        if (it == remap.end()) continue;
        kept.images.push_back(std::move(data.images[i]));
        kept.labels.push_back(it->second);
    }
    data = std::move(kept);
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    saak::io::atomic_write(
        path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string tensor_name(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05zu.stns", index);
    return buf;
}

struct SmoothSpec {
    std::string kind;  // "", "median", "mean"
    int kernel = 2;
};

saak::ImageTensor apply_smooth(const saak::ImageTensor& img, const SmoothSpec& s) {
    if (s.kind.empty()) return img;
    if (s.kind == "median") return saak::median_smooth(img, s.kernel);
    if (s.kind == "mean") return saak::mean_smooth(img, s.kernel);
    throw std::runtime_error("unknown smoothing kind '" + s.kind + "'");
}

int run_synth_data(const std::string& out, const saak::SyntheticSpec& spec) {
    auto data = saak::make_synthetic(spec);
    saak::write_cifar10_batch(out, data);
    std::cout << "wrote " << data.images.size() << " images (" << spec.num_classes
              << " classes) to " << out << "\n";
    return 0;
}

int run_train_kernels(const std::vector<std::string>& data, int spatial, int stages,
                      std::int64_t sample_cap, std::uint64_t seed, std::string tag,
                      const std::string& out) {
    auto set = load_batches(data);
    if (tag.empty()) tag = fs::path(data.front()).filename().string();
    const auto t0 = std::chrono::steady_clock::now();
    auto model = saak::train_model(set.images, {spatial, stages, 3}, sample_cap, seed, tag);
    const auto t1 = std::chrono::steady_clock::now();
    saak::save_model(model, out);
    std::cout << "trained (" << spatial << "-" << stages << ") on " << set.images.size()
              << " images in " << std::chrono::duration<double>(t1 - t0).count() << " s\n";
    for (const auto& st : model.stages)
        std::cout << "  stage " << st.stage_index << ": dim " << st.dim << " -> "
                  << st.out_channels() << " channels, lambda_max "
                  << (st.eigenvalues.empty() ? 0.0 : st.eigenvalues[0]) << "\n";
    std::cout << model.meta.sample_count << " cuboids used, model written to " << out
              << "\n";
    return 0;
}

int run_train_classifier(const std::vector<std::string>& data,
                         const std::vector<int>& classes, int epochs, double lr, int batch,
                         std::uint64_t seed, std::int64_t limit, const std::string& out) {
    auto set = load_batches(data);
    filter_classes(set, classes);
    if (limit > 0 && static_cast<std::int64_t>(set.images.size()) > limit) {
        set.images.resize(limit);
        set.labels.resize(limit);
    }
    const int num_classes = classes.empty() ? 10 : static_cast<int>(classes.size());
    double train_acc = 0.0;
    auto f = saak::train_classifier(set.images, set.labels, num_classes,
                                    {epochs, lr, batch, seed}, &train_acc);
    saak::save_classifier(f, out);
    std::cout << "trained softmax classifier on " << set.images.size()
              << " images, final train accuracy " << train_acc << ", written to " << out
              << "\n";
    return 0;
}

int run_export_data(const std::string& data, const std::string& out_dir,
                    const std::vector<int>& classes, std::int64_t limit) {
    auto set = load_batches({data});
    filter_classes(set, classes);
    if (limit > 0 && static_cast<std::int64_t>(set.images.size()) > limit) {
        set.images.resize(limit);
        set.labels.resize(limit);
    }
    fs::create_directories(out_dir);
    std::map<std::string, int> labels;
    for (std::size_t i = 0; i < set.images.size(); ++i) {
        const auto name = tensor_name(i);
        saak::write_tensor(fs::path(out_dir) / name, set.images[i]);
        labels[name] = set.labels[i];
    }
    saak::write_labels(fs::path(out_dir) / "labels.json", labels);
    std::cout << "exported " << set.images.size() << " tensors to " << out_dir << "\n";
    return 0;
}

int run_attack(const std::string& classifier, const std::string& kind, double eps,
               double step, int steps, std::uint64_t seed,
               const std::vector<std::string>& in, const std::string& out_dir,
               int threads) {
    auto f = saak::load_classifier(classifier);
    saak::AttackSpec spec;
    spec.kind = saak::parse_attack_kind(kind);
    spec.epsilon = eps;
    spec.step_size = step;
    spec.steps = steps;
    saak::validate_attack(spec);

    auto files = expand_inputs(in, ".stns");
    const auto labels = saak::read_labels(files.front().parent_path() / "labels.json");
    std::vector<saak::ImageTensor> images(files.size());
    std::vector<int> y(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        images[i] = saak::read_image_tensor(files[i]);
        auto it = labels.find(files[i].filename().string());
        if (it == labels.end())
            throw std::runtime_error("no label for " + files[i].filename().string());
        y[i] = it->second;
    }

    fs::create_directories(out_dir);
    std::vector<saak::ImageTensor> adv(files.size());
    saak::parallel_for(files.size(), threads,
                       [&](std::size_t i) { adv[i] = saak::run_attack(f, images[i], y[i], spec); });
    std::map<std::string, int> out_labels;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto name = files[i].filename().string();
        saak::write_tensor(fs::path(out_dir) / name, adv[i]);
        out_labels[name] = y[i];
    }
    saak::write_labels(fs::path(out_dir) / "labels.json", out_labels);

    json side;
    side["kind"] = kind;
    side["epsilon"] = eps;
    if (spec.kind == saak::AttackKind::Bim) {
        side["step_size"] = step;
        side["steps"] = steps;
    }
    side["seed"] = seed;
    side["classifier"] = classifier;
    write_text_atomic(fs::path(out_dir) / "attack_spec.json", side.dump(2) + "\n");
    std::cout << "attacked " << files.size() << " images -> " << out_dir << "\n";
    return 0;
}

int run_defend(const std::string& model_path, const std::string& strategy, int count,
               double param, const SmoothSpec& smooth, bool clamp,
               const std::vector<std::string>& in, const std::string& out_dir,
               int threads) {
    auto model = saak::load_model(model_path);
    saak::FilterSpec spec;
    spec.strategy = saak::parse_strategy(strategy);
    spec.count = count;
    spec.parameter = param;
    saak::validate_filter(spec, model.stages.back().out_channels());

    auto files = expand_inputs(in, ".stns");
    fs::create_directories(out_dir);
    std::vector<saak::ImageTensor> defended(files.size());
    saak::parallel_for(files.size(), threads, [&](std::size_t i) {
        auto img = saak::read_image_tensor(files[i]);
        defended[i] = apply_smooth(saak::defend(img, model, spec, clamp), smooth);
    });
    for (std::size_t i = 0; i < files.size(); ++i)
        saak::write_tensor(fs::path(out_dir) / files[i].filename(), defended[i]);

    const auto labels_in = files.front().parent_path() / "labels.json";
    if (fs::exists(labels_in))
        saak::write_labels(fs::path(out_dir) / "labels.json", saak::read_labels(labels_in));
    std::cout << "defended " << files.size() << " images -> " << out_dir << "\n";
    return 0;
}

int run_analyze(const std::string& model_path, const std::string& clean_dir,
                const std::string& adv_dir, const std::string& out,
                const std::string& histograms, int bins, int threads) {
    auto model = saak::load_model(model_path);
    auto clean_files = expand_inputs({clean_dir}, ".stns");
    std::vector<fs::path> pairs;
    for (const auto& f : clean_files)
        if (fs::exists(fs::path(adv_dir) / f.filename())) pairs.push_back(f.filename());
    if (pairs.empty()) throw std::runtime_error("no matching tensor pairs to analyze");

    std::vector<saak::CoefficientTensor> clean(pairs.size()), adv(pairs.size());
    saak::parallel_for(pairs.size(), threads, [&](std::size_t i) {
        clean[i] =
            saak::forward(saak::read_image_tensor(fs::path(clean_dir) / pairs[i]), model);
        adv[i] = saak::forward(saak::read_image_tensor(fs::path(adv_dir) / pairs[i]), model);
    });

    std::ostringstream csv;
    auto summary = saak::discriminability_report(clean, adv, csv);
    write_text_atomic(out, csv.str());
    std::cout << "analyzed " << pairs.size() << " pairs over " << clean[0].channels
              << " channels -> " << out << "\n"
              << "top-quartile mean normalized rmse    "
              << summary.top_quartile_mean_normalized_rmse << "\n"
              << "bottom-quartile mean normalized rmse "
              << summary.bottom_quartile_mean_normalized_rmse << "\n";

    if (!histograms.empty()) {
        const auto stats = saak::channel_stats(clean);
        std::ostringstream h;
        h << "channel,bin_lo,bin_hi,clean_count,adv_count\n";
        h.precision(12);
        for (int k = 0; k < clean[0].channels; ++k) {
            double lo = stats[k].min, hi = stats[k].max;
            if (!(hi > lo)) hi = lo + 1e-9;  // degenerate clean range
            auto hc = saak::channel_histogram(clean, k, bins, lo, hi);
            auto ha = saak::channel_histogram(adv, k, bins, lo, hi);
            for (int b = 0; b < bins; ++b)
                h << k << ',' << hc.edges[b] << ',' << hc.edges[b + 1] << ',' << hc.counts[b]
                  << ',' << ha.counts[b] << '\n';
        }
        write_text_atomic(histograms, h.str());
        std::cout << "histograms -> " << histograms << "\n";
    }
    return 0;
}

int run_evaluate(const std::string& classifier, const std::string& model_path,
                 const std::string& grid_path, const std::string& out, int threads) {
    auto f = saak::load_classifier(classifier);
    auto model = saak::load_model(model_path);
    const int K = model.stages.back().out_channels();

    std::ifstream gf(grid_path);
    if (!gf) throw std::runtime_error("cannot open grid config " + grid_path);
    json grid;
    gf >> grid;

    auto data = load_batches({grid.at("data").get<std::string>()});
    if (grid.contains("classes")) filter_classes(data, grid["classes"].get<std::vector<int>>());
    const std::size_t seed_count = grid.value("seed_count", 100);

    auto seed_idx = saak::select_seed_set(f, data.images, data.labels, seed_count);
    std::vector<saak::ImageTensor> seed;
    std::vector<int> labels;
    for (auto i : seed_idx) {
        seed.push_back(data.images[i]);
        labels.push_back(data.labels[i]);
    }

    SmoothSpec smooth;
    if (grid.contains("smooth")) {
        smooth.kind = grid["smooth"].value("kind", "median");
        smooth.kernel = grid["smooth"].value("kernel", 2);
    }

    // conditions: clean plus each attack, each evaluated with and without filters
    struct Condition {
        std::string name;
        std::vector<saak::ImageTensor> images;
    };
    std::vector<Condition> conditions;
    conditions.push_back({"clean", seed});
    for (const auto& a : grid.value("attacks", json::array())) {
        saak::AttackSpec spec;
        spec.kind = saak::parse_attack_kind(a.at("kind").get<std::string>());
        spec.epsilon = a.at("epsilon").get<double>();
        spec.step_size = a.value("step_size", 2.0 / 255.0);
        spec.steps = a.value("steps", 10);
        saak::validate_attack(spec);
        Condition c;
        c.name = saak::attack_kind_name(spec.kind);
        c.images.resize(seed.size());
        saak::parallel_for(seed.size(), threads, [&](std::size_t i) {
            c.images[i] = saak::run_attack(f, seed[i], labels[i], spec);
        });
        conditions.push_back(std::move(c));
    }

    struct FilterCase {
        std::string strategy;
        int count = 0;
        double parameter = 0.0;
    };
    std::vector<FilterCase> filters;
    for (const auto& spec : grid.value("filters", json::array())) {
        FilterCase base;
        base.strategy = spec.at("strategy").get<std::string>();
        base.parameter = spec.value("parameter", 0.0);
        for (int n : spec.at("counts").get<std::vector<int>>()) {
            FilterCase fc = base;
            fc.count = n;
            saak::FilterSpec check{saak::parse_strategy(fc.strategy), fc.count, fc.parameter};
            saak::validate_filter(check, K);
            filters.push_back(fc);
        }
    }

    std::ostringstream csv;
    csv << "# grid: " << grid.dump() << "\n";
    csv << "condition,attack,filter,count,parameter,accuracy,samples\n";
    csv.precision(10);
    for (const auto& cond : conditions) {
        // forward transforms computed once per condition, filters share them
        std::vector<saak::CoefficientTensor> coeffs(cond.images.size());
        saak::parallel_for(cond.images.size(), threads,
                           [&](std::size_t i) { coeffs[i] = saak::forward(cond.images[i], model); });

        const double base_acc = saak::evaluate_accuracy(f, cond.images, labels);
        csv << cond.name << "/none," << cond.name << ",none,0,0," << base_acc << ','
            << cond.images.size() << "\n";
        std::cout << cond.name << "/none: " << base_acc << "\n";

        for (const auto& fc : filters) {
            saak::FilterSpec spec{saak::parse_strategy(fc.strategy), fc.count, fc.parameter};
            std::vector<int> ok(cond.images.size(), 0);
            saak::parallel_for(cond.images.size(), threads, [&](std::size_t i) {
                auto img = apply_smooth(
                    saak::inverse(saak::apply_filter(coeffs[i], spec), model, true), smooth);
                ok[i] = f.predict(img) == labels[i] ? 1 : 0;
            });
            double acc = 0.0;
            for (int v : ok) acc += v;
            acc /= static_cast<double>(ok.size());
            const std::string cond_name =
                cond.name + "/" + fc.strategy + "-" + std::to_string(fc.count);
            csv << cond_name << ',' << cond.name << ',' << fc.strategy << ',' << fc.count
                << ',' << fc.parameter << ',' << acc << ',' << cond.images.size() << "\n";
            std::cout << cond_name << ": " << acc << "\n";
        }
    }
    write_text_atomic(out, csv.str());
    std::cout << "results -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-stage data-driven spectral transform and adversarial-perturbation "
                 "filtering pipeline"};
    app.require_subcommand(1);
    int threads = saak::default_threads();
    app.add_option("--threads", threads, "worker threads for per-image stages");

    auto* synth = app.add_subcommand("synth-data", "generate a synthetic CIFAR-layout batch");
    std::string synth_out;
    saak::SyntheticSpec synth_spec;
    synth->add_option("--out", synth_out, "output .bin batch")->required();
    synth->add_option("--count", synth_spec.count, "total images");
    synth->add_option("--classes", synth_spec.num_classes, "number of classes");
    synth->add_option("--seed", synth_spec.seed, "per-sample seed");
    synth->add_option("--class-seed", synth_spec.class_seed, "class prototype seed");
    synth->add_option("--contrast", synth_spec.contrast, "prototype amplitude");
    synth->add_option("--variation", synth_spec.variation, "per-sample smooth variation");
    synth->add_option("--noise", synth_spec.pixel_noise, "pixel noise sigma");

    auto* tk = app.add_subcommand("train-kernels", "train transform kernels from clean data");
    std::vector<std::string> tk_data;
    int tk_spatial = 2, tk_stages = 2;
    std::int64_t tk_cap = 200000;
    std::uint64_t tk_seed = 0;
    std::string tk_tag, tk_out;
    tk->add_option("--data", tk_data, "CIFAR .bin batches or a directory")->required();
    tk->add_option("--spatial", tk_spatial, "block side s");
    tk->add_option("--stages", tk_stages, "stage count T");
    tk->add_option("--sample-cap", tk_cap, "max cuboids per stage");
    tk->add_option("--seed", tk_seed, "subsample seed");
    tk->add_option("--tag", tk_tag, "dataset tag for provenance");
    tk->add_option("--out", tk_out, "output model file")->required();

    auto* tc = app.add_subcommand("train-classifier", "train the softmax target model");
    std::vector<std::string> tc_data;
    std::vector<int> tc_classes;
    int tc_epochs = 30, tc_batch = 64;
    double tc_lr = 0.1;
    std::uint64_t tc_seed = 1;
    std::int64_t tc_limit = 0;
    std::string tc_out;
    tc->add_option("--data", tc_data, "CIFAR .bin batches or a directory")->required();
    tc->add_option("--classes", tc_classes, "class subset, remapped to 0..k-1");
    tc->add_option("--epochs", tc_epochs, "training epochs");
    tc->add_option("--lr", tc_lr, "learning rate");
    tc->add_option("--batch", tc_batch, "mini-batch size");
    tc->add_option("--seed", tc_seed, "shuffle seed");
    tc->add_option("--limit", tc_limit, "cap on training images (0 = all)");
    tc->add_option("--out", tc_out, "output classifier file")->required();

    auto* ex = app.add_subcommand("export-data", "export batch records as tensor files");
    std::string ex_data, ex_out;
    std::vector<int> ex_classes;
    std::int64_t ex_limit = 0;
    ex->add_option("--data", ex_data, "CIFAR .bin batch")->required();
    ex->add_option("--out", ex_out, "output directory")->required();
    ex->add_option("--classes", ex_classes, "class subset, remapped to 0..k-1");
    ex->add_option("--limit", ex_limit, "cap on exported images (0 = all)");

    auto* at = app.add_subcommand("attack", "generate gradient-sign adversarial examples");
    std::string at_clf, at_kind = "fgsm", at_out;
    double at_eps = 8.0 / 255.0, at_step = 2.0 / 255.0;
    int at_steps = 10;
    std::uint64_t at_seed = 0;
    std::vector<std::string> at_in;
    at->add_option("--classifier", at_clf, "classifier file")->required();
    at->add_option("--kind", at_kind, "fgsm or bim");
    at->add_option("--eps", at_eps, "L-inf budget in normalized units");
    at->add_option("--step", at_step, "BIM step size");
    at->add_option("--steps", at_steps, "BIM iterations");
    at->add_option("--seed", at_seed, "recorded in the sidecar");
    at->add_option("--in", at_in, "tensor files or a directory (with labels.json)")->required();
    at->add_option("--out", at_out, "output directory")->required();

    auto* df = app.add_subcommand("defend", "apply the coefficient-filtering defense");
    std::string df_model, df_filter = "truncate", df_out, df_smooth;
    int df_count = 0, df_kernel = 2;
    double df_param = 0.0;
    bool df_no_clamp = false;
    std::vector<std::string> df_in;
    df->add_option("--model", df_model, "transform model file")->required();
    df->add_option("--filter", df_filter, "scale, truncate or clip");
    df->add_option("--count", df_count, "N highest-frequency channels to filter")->required();
    df->add_option("--param", df_param, "scale factor or clip bound");
    df->add_option("--smooth", df_smooth, "optional spatial smoothing: median or mean");
    df->add_option("--kernel", df_kernel, "smoothing window (2 or 3)");
    df->add_flag("--no-clamp", df_no_clamp, "skip the final [0,1] clamp");
    df->add_option("--in", df_in, "tensor files or a directory")->required();
    df->add_option("--out", df_out, "output directory")->required();

    auto* an = app.add_subcommand("analyze", "per-channel clean-vs-adversarial diagnostics");
    std::string an_model, an_clean, an_adv, an_out, an_hist;
    int an_bins = 50;
    an->add_option("--model", an_model, "transform model file")->required();
    an->add_option("--clean", an_clean, "directory of clean tensors")->required();
    an->add_option("--adv", an_adv, "directory of adversarial tensors")->required();
    an->add_option("--out", an_out, "output CSV report")->required();
    an->add_option("--histograms", an_hist, "optional per-channel histogram CSV");
    an->add_option("--bins", an_bins, "histogram bins");

    auto* ev = app.add_subcommand("evaluate", "filter/attack grid sweep on a seed set");
    std::string ev_clf, ev_model, ev_grid, ev_out;
    ev->add_option("--classifier", ev_clf, "classifier file")->required();
    ev->add_option("--model", ev_model, "transform model file")->required();
    ev->add_option("--grid", ev_grid, "JSON grid config")->required();
    ev->add_option("--out", ev_out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth_data(synth_out, synth_spec);
        if (tk->parsed())
            return run_train_kernels(tk_data, tk_spatial, tk_stages, tk_cap, tk_seed, tk_tag,
                                     tk_out);
        if (tc->parsed())
            return run_train_classifier(tc_data, tc_classes, tc_epochs, tc_lr, tc_batch,
                                        tc_seed, tc_limit, tc_out);
        if (ex->parsed()) return run_export_data(ex_data, ex_out, ex_classes, ex_limit);
        if (at->parsed())
            return run_attack(at_clf, at_kind, at_eps, at_step, at_steps, at_seed, at_in,
                              at_out, threads);
        if (df->parsed())
            return run_defend(df_model, df_filter, df_count, df_param, {df_smooth, df_kernel},
                              !df_no_clamp, df_in, df_out, threads);
        if (an->parsed())
            return run_analyze(an_model, an_clean, an_adv, an_out, an_hist, an_bins, threads);
        if (ev->parsed()) return run_evaluate(ev_clf, ev_model, ev_grid, ev_out, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
