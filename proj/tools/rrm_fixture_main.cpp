// Writes a synthetic bright-square fixture tree (images, per-scale feature
// tensors, classifier weights, ground truth, configs, manifest) so the mine
// and eval commands can be exercised without a backbone.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrm/config_io.hpp"
#include "rrm/crf.hpp"
#include "rrm/losses.hpp"
#include "rrm/synthetic.hpp"
#include "rrm/tensor_io.hpp"
#include "rrm/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Noisy two-class distribution peaked on the ground truth, plus its argmax:
// stand-ins for a segmentation network's output when exercising `loss` and
// `eval` without a trainer.
void write_network_stand_in(const rrm::SquareFixture& fx, std::uint64_t seed,
                            const fs::path& probs_path, const fs::path& pred_path) {
    rrm::Rng rng(seed ^ 0x5bd1e995u);
    const int h = fx.image.height, w = fx.image.width;
    rrm::Grid3 logits(2, h, w);
    for (int i = 0; i < h * w; ++i) {
        const int g = fx.ground_truth.labels[i];
        logits.at_flat(g, i) = 2.2 + rng.uniform(-1.5, 1.5);
        logits.at_flat(1 - g, i) = rng.uniform(-1.5, 1.5);
    }
    const rrm::ProbMap probs = rrm::softmax(logits);
    rrm::write_tensor(rrm::to_tensor(probs), probs_path);
    rrm::write_label_map(rrm::argmax_labels(probs), pred_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate a synthetic bright-square fixture tree"};
    std::string out;
    int count = 3, canvas = 48, square = 16;
    std::uint64_t seed = 7;
    double ratio = 0.4;
    app.add_option("--out", out, "output directory")->required();
    app.add_option("--count", count, "number of fixture images");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--canvas", canvas, "canvas side in pixels");
    app.add_option("--square", square, "square side in pixels");
    app.add_option("--ratio", ratio, "per-class selection ratio written to selection.json");
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path root(out);
        fs::create_directories(root / "images");
        fs::create_directories(root / "features");
        fs::create_directories(root / "gt");
        fs::create_directories(root / "probs");
        fs::create_directories(root / "pred");

        json images = json::array();
        for (int i = 0; i < count; ++i) {
            const rrm::SquareFixture fx =
                rrm::make_square_fixture(seed + std::uint64_t(i), canvas, square);
            char name[32];
            std::snprintf(name, sizeof name, "img_%03d", i);

            rrm::write_image_png(fx.image, root / "images" / (std::string(name) + ".png"));
            rrm::write_label_map(fx.ground_truth, root / "gt" / (std::string(name) + ".png"));
            write_network_stand_in(fx, seed + std::uint64_t(i),
                                   root / "probs" / (std::string(name) + ".rrmt"),
                                   root / "pred" / (std::string(name) + ".png"));

            json feature_paths = json::array();
            for (std::size_t s = 0; s < fx.per_scale_features.size(); ++s) {
                const std::string rel =
                    "features/" + std::string(name) + "_s" + std::to_string(s) + ".rrmt";
                rrm::write_tensor(fx.per_scale_features[s], root / rel);
                feature_paths.push_back(rel);
            }
            if (i == 0) {
                rrm::TensorF32 w;
                w.shape = {fx.weights.num_classes, fx.weights.feature_dim};
                w.data.assign(fx.weights.w.begin(), fx.weights.w.end());
                rrm::write_tensor(w, root / "weights.rrmt");
            }
            images.push_back({{"image", "images/" + std::string(name) + ".png"},
                              {"features", feature_paths},
                              {"classes", fx.classes.foreground_ids},
                              {"weights", "weights.rrmt"}});
        }

        rrm::SelectionConfig sel;
        sel.ratio = ratio;
        std::ofstream(root / "selection.json") << rrm::to_json(sel).dump(2) << "\n";
        std::ofstream(root / "crf.json") << rrm::to_json(rrm::CrfConfig{}).dump(2) << "\n";
        std::ofstream(root / "energy.json") << rrm::to_json(rrm::EnergyConfig{}).dump(2) << "\n";

        json manifest;
        manifest["images"] = images;
        manifest["selection"] = "selection.json";
        manifest["crf"] = "crf.json";
        manifest["energy"] = "energy.json";
        std::ofstream(root / "manifest.json") << manifest.dump(2) << "\n";

        std::cout << "wrote " << count << " fixtures under " << root.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
