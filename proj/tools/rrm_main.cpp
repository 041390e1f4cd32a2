// Command-line front end for the reliable-region mining pipeline:
//   rrm mine      generate pseudo labels from a manifest of images/features
//   rrm loss      evaluate the joint segmentation loss on one instance
//   rrm eval      mIoU over directories of label maps
//   rrm selftest  embedded property suite
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrm/config_io.hpp"
#include "rrm/eval.hpp"
#include "rrm/label_gen.hpp"
#include "rrm/losses.hpp"
#include "rrm/manifest.hpp"
#include "rrm/selftest.hpp"
#include "rrm/tensor_io.hpp"
#include "rrm/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int thread_count_from_env() {
    const char* env = std::getenv("RRM_THREADS");
    if (!env || !*env) return 0;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? int(v) : 0;
}

// Runs fn(i) for i in [0, n); 0 workers means sequential in index order.
template <typename F>
void for_each_index(int n, int workers, F&& fn) {
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int count = std::min(workers, n);
    pool.reserve(count);
    for (int t = 0; t < count; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.parent_path() / (".tmp." + path.filename().string());
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
    fs::rename(tmp, path);
}

void write_label_map_atomic(const rrm::LabelMap& m, const fs::path& path) {
    const fs::path tmp = path.parent_path() / (".tmp." + path.filename().string());
    rrm::write_label_map(m, tmp);
    fs::rename(tmp, path);
}

rrm::ClassifierWeights select_weight_rows(const rrm::TensorF32& all, const std::vector<int>& ids) {
    if (all.shape.size() != 2)
        throw std::runtime_error("weights tensor must have 2 axes [classes, feature_dim]");
    const int rows = all.shape[0], dim = all.shape[1];
    rrm::ClassifierWeights w;
    w.num_classes = int(ids.size());
    w.feature_dim = dim;
    w.w.reserve(ids.size() * std::size_t(dim));
    for (int id : ids) {
        if (id < 1 || id > rows)
            throw std::runtime_error("class id " + std::to_string(id) + " outside 1.." +
                                     std::to_string(rows) + " (weight rows)");
        for (int d = 0; d < dim; ++d)
            w.w.push_back(all.data[std::size_t(id - 1) * dim + d]);
    }
    return w;
}

int cmd_mine(const fs::path& manifest_path, const fs::path& out_dir, double gamma) {
    const rrm::PipelineManifest manifest = rrm::load_manifest(manifest_path);
    fs::create_directories(out_dir);

    const int n = int(manifest.images.size());
    std::vector<std::string> errors(n);

    for_each_index(n, thread_count_from_env(), [&](int idx) {
        const rrm::ManifestEntry& entry = manifest.images[idx];
        try {
            const rrm::ImageRGB image = rrm::read_image(entry.image);
            std::vector<rrm::TensorF32> features;
            features.reserve(entry.features.size());
            for (const fs::path& f : entry.features) features.push_back(rrm::read_tensor(f));
            const rrm::TensorF32 all_weights = rrm::read_tensor(entry.weights);
            const rrm::ClassifierWeights weights = select_weight_rows(all_weights, entry.classes);
            rrm::ClassSet classes;
            classes.foreground_ids = entry.classes;

            const rrm::LabelMap final_map =
                rrm::mine_reliable_regions(features, weights, classes, image, gamma,
                                           manifest.selection, manifest.crf);

            const std::string stem = entry.image.stem().string();
            write_label_map_atomic(final_map, out_dir / (stem + ".png"));

            std::map<int, std::int64_t> per_class;
            std::int64_t labeled = 0;
            for (std::uint8_t v : final_map.labels) {
                if (v == rrm::kUnlabeled) continue;
                ++labeled;
                ++per_class[v];
            }
            json sidecar;
            sidecar["image"] = entry.image.filename().string();
            sidecar["labeled_ratio"] = rrm::round_g9(double(labeled) / double(final_map.size()));
            json ratios = json::object();
            for (const auto& [id, cnt] : per_class)
                ratios[std::to_string(id)] = rrm::round_g9(double(cnt) / double(final_map.size()));
            sidecar["per_class_labeled_ratio"] = ratios;
            sidecar["config"] = {{"gamma", rrm::round_g9(gamma)},
                                 {"selection", rrm::to_json(manifest.selection)},
                                 {"crf", rrm::to_json(manifest.crf)}};
            write_text_atomic(out_dir / (stem + ".json"), sidecar.dump(2) + "\n");
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    });

    int failed = 0;
    for (int i = 0; i < n; ++i) {
        const std::string name = manifest.images[i].image.filename().string();
        if (errors[i].empty()) {
            std::cout << "ok " << name << "\n";
        } else {
            std::cout << "error " << name << ": " << errors[i] << "\n";
            ++failed;
        }
    }
    std::cout << "processed " << n << " images, " << failed << " failed\n";
    return failed ? 1 : 0;
}

// Central differences over a deterministic sample of coordinates; full FD on
// large inputs would square the already quadratic brute filter.
double sampled_fd_check(const rrm::ProbMap& probs, const rrm::ImageRGB& image,
                        const rrm::LabelMap& labels, const rrm::EnergyConfig& cfg) {
    const rrm::LossValueGrad joint = rrm::joint_seg_loss(probs, image, labels, cfg);
    const std::vector<double> s = rrm::energy_soft_filter(probs, labels, cfg);

    rrm::ProbMap p = probs;
    const std::size_t total = p.data.size();
    const std::size_t samples = std::min<std::size_t>(total, 60);
    const std::size_t stride = std::max<std::size_t>(1, total / samples);

    double worst = 0.0;
    for (std::size_t i = 0; i < total; i += stride) {
        const double orig = p.data[i];
        const double h = rrm::selftest::kFdStep;
        p.data[i] = orig + h;
        const double up = rrm::energy_value_pinned_soft_filter(p, image, s, cfg) +
                          rrm::cross_entropy_masked(p, labels).value;
        p.data[i] = orig - h;
        const double down = rrm::energy_value_pinned_soft_filter(p, image, s, cfg) +
                            rrm::cross_entropy_masked(p, labels).value;
        p.data[i] = orig;
        const double fd = (up - down) / (2.0 * h);
        const double a = joint.grad.data[i];
        const double denom = std::max({std::abs(a), std::abs(fd), 1e-8});
        worst = std::max(worst, std::abs(a - fd) / denom);
    }
    return worst;
}

int cmd_loss(const fs::path& probs_path, const fs::path& image_path, const fs::path& labels_path,
             const rrm::EnergyConfig& cfg, const fs::path& grad_out, bool check_grad) {
    const rrm::TensorF32 probs_t = rrm::read_tensor(probs_path);
    const rrm::ProbMap probs = rrm::to_grid(probs_t);
    const rrm::ImageRGB image = rrm::read_image(image_path);
    const rrm::LabelMap labels = rrm::read_label_map(labels_path, probs.channels - 1);

    const rrm::LossValueGrad ce = rrm::cross_entropy_masked(probs, labels);
    const rrm::LossValueGrad energy = rrm::energy_loss(probs, image, labels, cfg);

    json out;
    out["ce"] = rrm::round_g9(ce.value);
    out["energy"] = rrm::round_g9(energy.value);
    out["joint"] = rrm::round_g9(ce.value + energy.value);
    if (check_grad) {
        const double err = sampled_fd_check(probs, image, labels, cfg);
        out["grad_max_rel_err"] = rrm::round_g9(err);
        out["grad_tol"] = rrm::selftest::kGradTol;
    }
    std::cout << out.dump() << "\n";

    if (!grad_out.empty()) {
        rrm::Grid3 grad = ce.grad;
        for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] += energy.grad.data[i];
        rrm::write_tensor(rrm::to_tensor(grad), grad_out);
    }
    return 0;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, int num_classes, bool as_json) {
    const auto list_pngs = [](const fs::path& dir) {
        std::set<std::string> names;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".png")
                names.insert(e.path().filename().string());
        return names;
    };
    const std::set<std::string> pred_names = list_pngs(pred_dir);
    const std::set<std::string> gt_names = list_pngs(gt_dir);
    if (pred_names.empty()) throw std::runtime_error("eval: no .png files in " + pred_dir.string());
    if (pred_names != gt_names) {
        std::string msg = "eval: directories do not hold matching filenames;";
        for (const auto& n : pred_names)
            if (!gt_names.count(n)) msg += " missing gt for " + n + ";";
        for (const auto& n : gt_names)
            if (!pred_names.count(n)) msg += " missing prediction for " + n + ";";
        throw std::runtime_error(msg);
    }

    // infer the class count when not given
    if (num_classes < 0) {
        int mx = 0;
        for (const auto& name : pred_names) {
            for (const fs::path dir : {pred_dir, gt_dir}) {
                const rrm::LabelMap m = rrm::read_label_map(dir / name, 254);
                for (std::uint8_t v : m.labels)
                    if (v != rrm::kUnlabeled) mx = std::max(mx, int(v));
            }
        }
        num_classes = mx;
    }

    rrm::ConfusionMatrix cm(num_classes);
    for (const auto& name : pred_names) {
        const rrm::LabelMap pred = rrm::read_label_map(pred_dir / name, num_classes);
        const rrm::LabelMap gt = rrm::read_label_map(gt_dir / name, num_classes);
        cm += rrm::confusion(gt, pred, num_classes);
    }
    const rrm::MiouResult r = rrm::miou(cm);

    if (as_json) {
        json out;
        out["miou"] = rrm::round_g9(r.miou);
        out["evaluated_pixels"] = cm.total();
        json per = json::object();
        for (int c = 0; c <= num_classes; ++c)
            if (r.valid[c]) per[std::to_string(c)] = rrm::round_g9(r.per_class[c]);
        out["per_class"] = per;
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "class  iou\n";
        for (int c = 0; c <= num_classes; ++c) {
            if (!r.valid[c]) continue;
            std::string id = std::to_string(c);
            id.resize(6, ' ');
            std::cout << id << " " << rrm::fmt_g9(r.per_class[c]) << "\n";
        }
        std::cout << "mIoU   " << rrm::fmt_g9(r.miou) << "\n";
    }
    return 0;
}

int cmd_selftest(std::uint64_t seed, const fs::path& energy_config_path,
                 const fs::path& crf_config_path) {
    rrm::EnergyConfig ecfg;
    rrm::CrfConfig ccfg;
    if (!energy_config_path.empty()) ecfg = rrm::load_energy_config(energy_config_path);
    if (!crf_config_path.empty()) ccfg = rrm::load_crf_config(crf_config_path);
    rrm::validate(ecfg);
    rrm::validate(ccfg);

    std::cout << "seed " << seed << "\n";
    const auto results = rrm::selftest::run(seed, ecfg, ccfg);
    int passed = 0;
    for (const auto& r : results) {
        std::string name = r.name;
        name.resize(26, ' ');
        std::cout << name << (r.pass ? "PASS  " : "FAIL  ") << r.detail << "\n";
        if (r.pass) ++passed;
    }
    std::cout << "selftest: " << passed << "/" << results.size() << " properties passed\n";
    return passed == int(results.size()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reliable region mining: pseudo labels, joint loss, metrics"};
    app.require_subcommand(1);

    // mine
    auto* mine = app.add_subcommand("mine", "mine reliable-region pseudo labels for a manifest");
    std::string mine_manifest, mine_out;
    double gamma = 4.0;
    mine->add_option("--manifest", mine_manifest, "pipeline manifest JSON")->required();
    mine->add_option("--out", mine_out, "output directory")->required();
    mine->add_option("--gamma", gamma, "background decay exponent (> 1)");

    // loss
    auto* loss = app.add_subcommand("loss", "evaluate cross entropy + dense energy loss");
    std::string loss_probs, loss_image, loss_labels, loss_config, loss_grad_out;
    std::string normalization, soft_filter, soft_filter_grad;
    double sigma_d = -1.0, sigma_r = -1.0;
    int brute_cap = -1;
    bool use_brute = false, use_lattice = false, check_grad = false;
    loss->add_option("--probs", loss_probs, "probability tensor (C,H,W), channel 0 background")
        ->required();
    loss->add_option("--image", loss_image, "RGB image (PNG or PPM)")->required();
    loss->add_option("--labels", loss_labels, "label map PNG (255 = unlabeled)")->required();
    loss->add_option("--config", loss_config, "energy config JSON");
    loss->add_option("--sigma-d", sigma_d, "spatial bandwidth in pixels");
    loss->add_option("--sigma-r", sigma_r, "color bandwidth in 8-bit units");
    loss->add_option("--normalization", normalization, "pixel_count | kernel_sum");
    loss->add_option("--soft-filter", soft_filter, "enabled | disabled");
    loss->add_option("--soft-filter-grad", soft_filter_grad, "stop | subgradient");
    loss->add_option("--brute-cap", brute_cap, "pixel cap for the brute-force path");
    loss->add_flag("--brute", use_brute, "force the exact O(N^2) filter path");
    loss->add_flag("--lattice", use_lattice, "force the permutohedral filter path");
    loss->add_option("--grad-out", loss_grad_out, "write the joint gradient tensor here");
    loss->add_flag("--check-grad", check_grad,
                   "finite-difference check over a deterministic coordinate sample");

    // eval
    auto* eval = app.add_subcommand("eval", "mIoU between prediction and ground-truth dirs");
    std::string pred_dir, gt_dir;
    int num_classes = -1;
    bool eval_json = false;
    eval->add_option("--pred", pred_dir, "directory of predicted label PNGs")->required();
    eval->add_option("--gt", gt_dir, "directory of ground-truth label PNGs")->required();
    eval->add_option("--classes", num_classes, "foreground class count (default: inferred)");
    eval->add_flag("--json", eval_json, "emit JSON instead of the table");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "run the embedded property suite");
    std::uint64_t seed = 42;
    std::string st_energy, st_crf;
    selftest->add_option("--seed", seed, "seed for generated instances");
    selftest->add_option("--energy-config", st_energy, "energy config JSON to validate and use");
    selftest->add_option("--crf-config", st_crf, "CRF config JSON to validate and use");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mine) {
            if (!(gamma > 1.0)) throw std::runtime_error("--gamma must be > 1");
            return cmd_mine(mine_manifest, mine_out, gamma);
        }
        if (*loss) {
            rrm::EnergyConfig cfg;
            if (!loss_config.empty()) cfg = rrm::load_energy_config(loss_config);
            if (sigma_d > 0.0) cfg.sigma_d = sigma_d;
            if (sigma_r > 0.0) cfg.sigma_r = sigma_r;
            if (!normalization.empty())
                cfg.normalization = normalization == "kernel_sum"
                                        ? rrm::EnergyNormalization::kernel_sum
                                        : rrm::EnergyNormalization::pixel_count;
            if (!soft_filter.empty()) cfg.soft_filter = soft_filter != "disabled";
            if (!soft_filter_grad.empty())
                cfg.soft_filter_grad = soft_filter_grad == "subgradient"
                                           ? rrm::SoftFilterGrad::subgradient
                                           : rrm::SoftFilterGrad::stop;
            if (brute_cap > 0) cfg.brute_cap = brute_cap;
            if (use_brute && use_lattice)
                throw std::runtime_error("--brute and --lattice are mutually exclusive");
            if (use_brute) cfg.fast_path = rrm::FilterPath::brute;
            if (use_lattice) cfg.fast_path = rrm::FilterPath::lattice;
            rrm::validate(cfg);
            return cmd_loss(loss_probs, loss_image, loss_labels, cfg, loss_grad_out, check_grad);
        }
        if (*eval) return cmd_eval(pred_dir, gt_dir, num_classes, eval_json);
        if (*selftest) return cmd_selftest(seed, st_energy, st_crf);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
