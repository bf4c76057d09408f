#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "aaseg/hed3d.hpp"
#include "aaseg/metrics.hpp"
#include "aaseg/phantom.hpp"
#include "aaseg/postseg.hpp"
#include "aaseg/prep.hpp"
#include "aaseg/volio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aaseg;

namespace {

constexpr char kArtifactVersion[] = "aaseg-1";

// input/usage problems exit with 2; anything else that escapes is a
// computation failure and exits with 1
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// atomic write: temp file in the same directory, then rename
void write_manifest(const json& manifest, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw Error("cannot write manifest " + path.string());
    os << manifest.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

json base_manifest(const std::string& command, uint64_t seed, int threads) {
  json m;
  m["command"] = command;
  m["seed"] = seed;
  m["threads"] = threads;
  m["artifact_version"] = kArtifactVersion;
  m["timestamp"] = now_iso8601();
  return m;
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path))
    throw UsageError(what + " not found: " + path);
}

void require_dir(const std::string& path, const std::string& what) {
  if (!fs::is_directory(path))
    throw UsageError(what + " not found: " + path);
}

std::vector<int> parse_int_list(const std::string& s, std::size_t want,
                                const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.size() != want)
    throw UsageError(flag + " expects " + std::to_string(want) +
                     " comma-separated integers, got '" + s + "'");
  return out;
}

// ---------------------------------------------------------------------------
// phantom
// ---------------------------------------------------------------------------

phantom::PhantomSpec load_phantom_spec(const std::string& path) {
  phantom::PhantomSpec s;
  if (path.empty()) return s;
  require_file(path, "phantom spec");
  std::ifstream is(path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw UsageError("phantom spec " + path + ": line " +
                         std::to_string(lineno) + " is not key=value");
      continue;
    }
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "semi_x") s.semi_x = std::stod(val);
    else if (key == "semi_y") s.semi_y = std::stod(val);
    else if (key == "semi_z") s.semi_z = std::stod(val);
    else if (key == "lumen_radius") s.lumen_radius = std::stod(val);
    else if (key == "waviness") s.waviness = std::stod(val);
    else if (key == "noise_sigma") s.noise_sigma = std::stod(val);
    else if (key == "hu_lumen") s.hu_lumen = std::stod(val);
    else if (key == "hu_thrombus") s.hu_thrombus = std::stod(val);
    else if (key == "hu_vertebra") s.hu_vertebra = std::stod(val);
    else if (key == "hu_bowel") s.hu_bowel = std::stod(val);
    else if (key == "hu_background") s.hu_background = std::stod(val);
    else if (key == "hu_stent") s.hu_stent = std::stod(val);
    else if (key == "with_confounders") s.with_confounders = (val == "1" || val == "true");
    else throw UsageError("phantom spec " + path + ": unknown key '" + key + "'");
  }
  return s;
}

int cmd_phantom(int n, const std::string& spec_path, const std::string& out_dir,
                uint64_t seed, int threads) {
  const phantom::PhantomSpec base = load_phantom_spec(spec_path);
  fs::create_directories(out_dir);
  const auto cohort = phantom::generate_cohort(n, base, seed);

  json cases = json::array();
  for (const auto& c : cohort) {
    const std::string img = c.case_id + "_img.mha";
    const std::string mask = c.case_id + "_mask.mha";
    io::write_metaimage(c.vol, (fs::path(out_dir) / img).string());
    io::write_metaimage(c.mask, (fs::path(out_dir) / mask).string());
    cases.push_back({{"case_id", c.case_id},
                     {"stage", c.stage},
                     {"seed", c.seed},
                     {"image", img},
                     {"mask", mask}});
  }

  json m = base_manifest("phantom", seed, threads);
  m["parameters"] = {{"n", n},
                     {"spec", spec_path},
                     {"spec_version", phantom::default_spec_version()},
                     {"spec_hash", phantom::spec_hash(base)}};
  m["outputs"] = {{"dir", out_dir}};
  m["cases"] = cases;
  write_manifest(m, fs::path(out_dir) / "cohort.json");
  std::cout << "wrote " << n << " cases to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// preprocess
// ---------------------------------------------------------------------------

int cmd_preprocess(const std::string& in_path, const std::string& out_path,
                   const std::string& roi, double wc, double ww,
                   const std::string& target, uint64_t seed, int threads) {
  require_file(in_path, "input volume");
  Volume3D vol = io::read_metaimage_volume(in_path);
  if (!roi.empty()) {
    const auto v = parse_int_list(roi, 6, "--roi");
    vol = prep::crop_roi(vol, {v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  vol = prep::window_level(vol, wc, ww);
  if (!target.empty()) {
    const auto d = parse_int_list(target, 3, "--target-dims");
    vol = prep::resample_trilinear(vol, {d[0], d[1], d[2]});
  }
  io::write_metaimage(vol, out_path);

  json m = base_manifest("preprocess", seed, threads);
  m["parameters"] = {{"roi", roi},
                     {"window_center", wc},
                     {"window_width", ww},
                     {"target_dims", target}};
  m["inputs"] = {{"volume", in_path}};
  m["outputs"] = {{"volume", out_path}};
  write_manifest(m, out_path + ".manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct LoadedCase {
  std::string case_id;
  std::string stage;
  Volume3D vol;
  BinaryMask3D mask;
};

std::vector<LoadedCase> load_cohort(const std::string& dir) {
  require_dir(dir, "cohort directory");
  std::vector<LoadedCase> cases;
  const fs::path manifest_path = fs::path(dir) / "cohort.json";
  if (fs::is_regular_file(manifest_path)) {
    std::ifstream is(manifest_path);
    json m;
    try {
      is >> m;
    } catch (const json::exception& e) {
      throw UsageError("cohort manifest " + manifest_path.string() +
                       " does not parse: " + e.what());
    }
    for (const auto& c : m.at("cases")) {
      LoadedCase lc;
      lc.case_id = c.at("case_id").get<std::string>();
      lc.stage = c.value("stage", "");
      lc.vol = io::read_metaimage_volume((fs::path(dir) / c.at("image").get<std::string>()).string());
      lc.mask = io::read_metaimage_mask((fs::path(dir) / c.at("mask").get<std::string>()).string());
      cases.push_back(std::move(lc));
    }
  } else {
    // fall back to the naming convention
    std::vector<fs::path> imgs;
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (name.size() > 8 && name.substr(name.size() - 8) == "_img.mha")
        imgs.push_back(e.path());
    }
    std::sort(imgs.begin(), imgs.end());
    for (const auto& img : imgs) {
      LoadedCase lc;
      const std::string stem = img.filename().string();
      lc.case_id = stem.substr(0, stem.size() - 8);
      lc.vol = io::read_metaimage_volume(img.string());
      lc.mask = io::read_metaimage_mask(
          (img.parent_path() / (lc.case_id + "_mask.mha")).string());
      cases.push_back(std::move(lc));
    }
  }
  if (cases.empty()) throw UsageError("cohort directory has no cases: " + dir);
  return cases;
}

hed::TrainSample to_sample(const LoadedCase& lc, const hed::Hed3DConfig& cfg,
                           double wc, double ww) {
  Volume3D v = prep::window_level(lc.vol, wc, ww);
  if (v.dims != cfg.input_dims) v = prep::resample_trilinear(v, cfg.input_dims);
  BinaryMask3D m = lc.mask;
  if (m.dims != cfg.input_dims) m = prep::resample_nearest(m, cfg.input_dims);
  hed::TrainSample s;
  s.image = volume_to_tensor(v, 255.0f);
  s.label = mask_to_tensor(m);
  return s;
}

int cmd_train(const std::string& cohort_dir, const std::string& net_config_path,
              const std::string& out_ckpt, const std::string& history_path,
              int epochs, int batch, double lr, int val_count, double wc, double ww,
              uint64_t seed, int threads) {
  const auto cases = load_cohort(cohort_dir);

  hed::Hed3DConfig cfg = hed::Hed3DConfig::desk();
  if (!net_config_path.empty()) {
    require_file(net_config_path, "network config");
    std::ifstream is(net_config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    cfg = hed::Hed3DConfig::from_json(ss.str());
  }
  cfg.validate();

  std::vector<hed::TrainSample> train_set, val_set;
  const int n = static_cast<int>(cases.size());
  int nval = val_count >= 0 ? val_count : std::max(1, n / 5);
  if (nval >= n) nval = n - 1;  // keep at least one training sample
  for (int i = 0; i < n; ++i) {
    auto s = to_sample(cases[static_cast<std::size_t>(i)], cfg, wc, ww);
    (i < n - nval ? train_set : val_set).push_back(std::move(s));
  }
  if (val_set.empty()) val_set = train_set;  // single-case overfit runs

  hed::Hed3DNet net = hed::build(cfg, seed);
  hed::TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = batch;
  tc.initial_lr = lr;
  tc.seed = seed;
  const hed::TrainResult result = hed::train(net, train_set, val_set, tc);
  hed::apply_params(net, result.best_params);
  hed::save_checkpoint(net, out_ckpt);

  const std::string hist =
      history_path.empty() ? out_ckpt + ".history.csv" : history_path;
  hed::write_history_csv(result.history, hist);

  json m = base_manifest("train", seed, threads);
  m["parameters"] = {{"epochs", epochs},       {"batch_size", batch},
                     {"initial_lr", lr},       {"val_count", nval},
                     {"window_center", wc},    {"window_width", ww},
                     {"net_config", cfg.to_json()}};
  m["inputs"] = {{"cohort", cohort_dir}};
  m["outputs"] = {{"checkpoint", out_ckpt},
                  {"history", hist},
                  {"best_val_loss", result.best_val_loss}};
  write_manifest(m, out_ckpt + ".manifest.json");
  std::cout << "best validation loss " << result.best_val_loss << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

int cmd_predict(const std::string& ckpt_path, const std::string& in_path,
                const std::string& out_mask, const std::string& out_prob,
                double wc, double ww, uint64_t seed, int threads) {
  require_file(ckpt_path, "checkpoint");
  require_file(in_path, "input volume");
  hed::Hed3DNet net = hed::load_checkpoint(ckpt_path);
  const Volume3D orig = io::read_metaimage_volume(in_path);

  Volume3D v = prep::window_level(orig, wc, ww);
  if (v.dims != net.config.input_dims)
    v = prep::resample_trilinear(v, net.config.input_dims);

  const Volume3D prob = hed::predict(net, v);
  const double t = postseg::otsu_threshold(prob);
  BinaryMask3D mask = postseg::largest_component(postseg::binarize(prob, t));
  if (mask.dims != orig.dims) mask = prep::resample_nearest(mask, orig.dims);
  io::write_metaimage(mask, out_mask);
  if (!out_prob.empty()) io::write_metaimage(prob, out_prob);

  json m = base_manifest("predict", seed, threads);
  m["parameters"] = {{"window_center", wc},
                     {"window_width", ww},
                     {"otsu_threshold", t}};
  m["inputs"] = {{"checkpoint", ckpt_path}, {"volume", in_path}};
  m["outputs"] = {{"mask", out_mask}, {"prob", out_prob}};
  write_manifest(m, out_mask + ".manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate / report
// ---------------------------------------------------------------------------

std::map<std::string, std::string> stage_map(const std::string& gt_dir) {
  std::map<std::string, std::string> stages;
  const fs::path manifest_path = fs::path(gt_dir) / "cohort.json";
  if (!fs::is_regular_file(manifest_path)) return stages;
  std::ifstream is(manifest_path);
  json m;
  is >> m;
  for (const auto& c : m.at("cases"))
    stages[c.at("case_id").get<std::string>()] = c.value("stage", "");
  return stages;
}

std::vector<metrics::MetricsReport> evaluate_dirs(const std::string& pred_dir,
                                                  const std::string& gt_dir) {
  require_dir(pred_dir, "prediction directory");
  require_dir(gt_dir, "ground-truth directory");
  const auto stages = stage_map(gt_dir);

  std::vector<fs::path> gts;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 9 && name.substr(name.size() - 9) == "_mask.mha")
      gts.push_back(e.path());
  }
  std::sort(gts.begin(), gts.end());
  if (gts.empty())
    throw UsageError("ground-truth directory has no *_mask.mha files: " + gt_dir);

  std::vector<metrics::MetricsReport> rows;
  for (const auto& gt_path : gts) {
    const std::string name = gt_path.filename().string();
    const std::string case_id = name.substr(0, name.size() - 9);
    const fs::path pred_path = fs::path(pred_dir) / name;
    require_file(pred_path.string(), "prediction for " + case_id);
    const BinaryMask3D pred = io::read_metaimage_mask(pred_path.string());
    const BinaryMask3D gt = io::read_metaimage_mask(gt_path.string());
    const auto it = stages.find(case_id);
    rows.push_back(metrics::evaluate_case(pred, gt, case_id,
                                          it == stages.end() ? "" : it->second));
  }
  return rows;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& out_csv, bool print_summary, uint64_t seed,
                 int threads) {
  const auto rows = evaluate_dirs(pred_dir, gt_dir);
  io::write_report(rows, out_csv);

  double mean_dice = 0;
  for (const auto& r : rows) mean_dice += r.dice;
  mean_dice /= static_cast<double>(rows.size());
  std::cout << "cases " << rows.size() << "  mean dice " << mean_dice << "\n";

  if (print_summary) {
    std::vector<double> pre, post;
    for (const auto& r : rows)
      (r.stage == "post" ? post : pre).push_back(r.dice);
    for (const auto& r : rows)
      std::cout << r.case_id << (r.stage.empty() ? "" : " [" + r.stage + "]")
                << "  dice " << r.dice << "  max diameter " << r.max_diameter_mm
                << " mm (gt " << r.gt_max_diameter_mm << ")  rvd "
                << r.rel_vol_diff << "\n";
    if (!pre.empty() && !post.empty()) {
      const auto mw = metrics::mann_whitney_u(pre, post);
      std::cout << "pre vs post dice: Mann-Whitney U " << mw.u_a << " ("
                << (mw.exact ? "exact" : "approximate") << " p " << mw.p << ")\n";
    }
  }

  json m = base_manifest(print_summary ? "report" : "evaluate", seed, threads);
  m["inputs"] = {{"pred", pred_dir}, {"gt", gt_dir}};
  m["outputs"] = {{"report", out_csv}};
  write_manifest(m, out_csv + ".manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------------

int cmd_gradcheck(uint64_t seed) {
  constexpr int kSeeds = 20;
  constexpr double kTol64 = 1e-5, kTol32 = 1e-3;

  struct OpCheck {
    const char* name;
    std::function<TensorT<double>(const std::vector<Tensor5d>&)> fwd64;
    std::function<std::vector<Tensor5d>(const std::vector<Tensor5d>&, const Tensor5d&)> bwd64;
    std::function<std::vector<Tensor5>(const std::vector<Tensor5>&, const Tensor5&)> bwd32;
    std::vector<std::array<int64_t, 5>> shapes;
  };
  const std::vector<OpCheck> ops = {
      {"conv3d",
       [](const std::vector<Tensor5d>& xs) {
         return nn::conv3d_core(xs[0], xs[1], 1, {1, 1, 1});
       },
       [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
         auto g = nn::conv3d_backward(u, xs[0], xs[1], 1, {1, 1, 1});
         return std::vector<Tensor5d>{g.input, g.weight};
       },
       [](const std::vector<Tensor5>& xs, const Tensor5& u) {
         auto g = nn::conv3d_backward(u, xs[0], xs[1], 1, {1, 1, 1});
         return std::vector<Tensor5>{g.input, g.weight};
       },
       {{1, 2, 3, 3, 3}, {2, 2, 2, 2, 2}}},
      {"conv_transpose3d",
       [](const std::vector<Tensor5d>& xs) {
         return nn::conv_transpose3d(xs[0], xs[1], 2, {1, 1, 1});
       },
       [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
         auto g = nn::conv_transpose3d_backward(u, xs[0], xs[1], 2, {1, 1, 1});
         return std::vector<Tensor5d>{g.input, g.weight};
       },
       [](const std::vector<Tensor5>& xs, const Tensor5& u) {
         auto g = nn::conv_transpose3d_backward(u, xs[0], xs[1], 2, {1, 1, 1});
         return std::vector<Tensor5>{g.input, g.weight};
       },
       {{1, 2, 2, 2, 2}, {2, 1, 4, 4, 4}}},
      {"maxpool3d",
       [](const std::vector<Tensor5d>& xs) { return nn::maxpool3d(xs[0]).out; },
       [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
         const auto r = nn::maxpool3d(xs[0]);
         return std::vector<Tensor5d>{nn::maxpool3d_backward(u, r.argmax, xs[0].shape)};
       },
       [](const std::vector<Tensor5>& xs, const Tensor5& u) {
         const auto r = nn::maxpool3d(xs[0]);
         return std::vector<Tensor5>{nn::maxpool3d_backward(u, r.argmax, xs[0].shape)};
       },
       {{1, 2, 4, 4, 4}}},
      {"relu",
       [](const std::vector<Tensor5d>& xs) { return nn::relu(xs[0]); },
       [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
         return std::vector<Tensor5d>{nn::relu_backward(u, xs[0])};
       },
       [](const std::vector<Tensor5>& xs, const Tensor5& u) {
         return std::vector<Tensor5>{nn::relu_backward(u, xs[0])};
       },
       {{1, 1, 3, 3, 3}}},
      {"sigmoid",
       [](const std::vector<Tensor5d>& xs) { return nn::sigmoid(xs[0]); },
       [](const std::vector<Tensor5d>& xs, const Tensor5d& u) {
         return std::vector<Tensor5d>{nn::sigmoid_backward(u, nn::sigmoid(xs[0]))};
       },
       [](const std::vector<Tensor5>& xs, const Tensor5& u) {
         return std::vector<Tensor5>{nn::sigmoid_backward(u, nn::sigmoid(xs[0]))};
       },
       {{1, 1, 3, 3, 3}}},
      {"elementwise_add",
       [](const std::vector<Tensor5d>& xs) {
         return nn::elementwise_add(xs[0], xs[1]);
       },
       [](const std::vector<Tensor5d>&, const Tensor5d& u) {
         return std::vector<Tensor5d>{u, u};
       },
       [](const std::vector<Tensor5>&, const Tensor5& u) {
         return std::vector<Tensor5>{u, u};
       },
       {{1, 1, 2, 2, 2}, {1, 1, 2, 2, 2}}},
  };

  bool all_pass = true;
  std::printf("%-20s %-14s %-14s %s\n", "op", "max err 64", "max err 32", "status");
  for (const auto& op : ops) {
    double e64 = 0, e32 = 0;
    for (int trial = 0; trial < kSeeds; ++trial) {
      Rng rng(hash_mix(seed, static_cast<uint64_t>(trial), 0x6c1));
      std::vector<Tensor5d> xs64;
      std::vector<Tensor5> xs32;
      for (const auto& sh : op.shapes) {
        Tensor5 t = nn::random_tensor<float>(sh, rng);
        if (std::string(op.name) == "relu")  // keep clear of the kink
          for (auto& v : t.data)
            while (std::abs(v) < 1e-3f) v = rng.uniformf(-1, 1);
        if (std::string(op.name) == "maxpool3d") {
          // well-separated values so the argmax cannot flip inside the
          // finite-difference step
          std::vector<std::size_t> order(t.data.size());
          std::iota(order.begin(), order.end(), 0);
          for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[static_cast<std::size_t>(
                                    rng.uniform_int(0, static_cast<int64_t>(i)))]);
          for (std::size_t i = 0; i < order.size(); ++i)
            t.data[order[i]] = -0.64f + 0.02f * static_cast<float>(i);
        }
        Tensor5d d(sh);
        for (std::size_t i = 0; i < t.data.size(); ++i) d.data[i] = t.data[i];
        xs32.push_back(std::move(t));
        xs64.push_back(std::move(d));
      }
      Rng rng64 = rng, rng32 = rng;
      e64 = std::max(e64, nn::grad_check<double>(op.fwd64, op.bwd64, xs64, rng64));
      e32 = std::max(e32, nn::grad_check_mixed(op.fwd64, op.bwd32, xs32, rng32));
    }
    const bool ok = e64 < kTol64 && e32 < kTol32;
    all_pass = all_pass && ok;
    std::printf("%-20s %-14.3e %-14.3e %s\n", op.name, e64, e32, ok ? "pass" : "FAIL");
  }

  // weighted Dice loss: closed-form analytic gradient vs central differences
  double loss_err = 0;
  for (int trial = 0; trial < kSeeds; ++trial) {
    Rng rng(hash_mix(seed, static_cast<uint64_t>(trial), 0x1055ULL));
    Tensor5d pred({1, 1, 3, 3, 3});
    Tensor5d target({1, 1, 3, 3, 3});
    for (auto& v : pred.data) v = rng.uniform(0.05, 0.95);
    for (auto& v : target.data) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
    const auto lr = hed::weighted_dice_loss<double>(pred, target);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
      const double h = 1e-6;
      Tensor5d p = pred;
      p.data[i] += h;
      const double lp = hed::weighted_dice_loss<double>(p, target).loss;
      p.data[i] -= 2 * h;
      const double lm = hed::weighted_dice_loss<double>(p, target).loss;
      const double numeric = (lp - lm) / (2 * h);
      const double a = lr.grad.data[i];
      loss_err = std::max(loss_err, std::abs(a - numeric) /
                                        std::max({std::abs(a), std::abs(numeric), 1e-8}));
    }
  }
  const bool loss_ok = loss_err < kTol64;
  all_pass = all_pass && loss_ok;
  std::printf("%-20s %-14.3e %-14s %s\n", "weighted_dice_loss", loss_err, "-",
              loss_ok ? "pass" : "FAIL");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D CNN aneurysm segmentation pipeline"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);

  uint64_t seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "global random seed")->configurable(true);
  app.add_option("--threads", threads, "worker thread count")->configurable(true);

  // phantom
  auto* sp = app.add_subcommand("phantom", "generate a synthetic cohort");
  int ph_n = 1;
  std::string ph_spec, ph_out;
  sp->add_option("--n", ph_n, "number of cases");
  sp->add_option("--spec", ph_spec, "phantom spec file (key=value)");
  sp->add_option("--out", ph_out, "output cohort directory")->required();

  // preprocess
  auto* sq = app.add_subcommand("preprocess", "crop / window / resample a volume");
  std::string pp_in, pp_out, pp_roi, pp_target;
  double pp_wc = 150, pp_ww = 500;
  sq->add_option("--in", pp_in, "input volume")->required();
  sq->add_option("--out", pp_out, "output volume")->required();
  sq->add_option("--roi", pp_roi, "x0,y0,z0,x1,y1,z1 inclusive voxel bounds");
  sq->add_option("--window-center", pp_wc, "window center (HU)");
  sq->add_option("--window-width", pp_ww, "window width (HU)");
  sq->add_option("--target-dims", pp_target, "nx,ny,nz resample target");

  // train
  auto* st = app.add_subcommand("train", "train the segmentation network");
  std::string tr_cohort, tr_netcfg, tr_out, tr_hist;
  int tr_epochs = 100, tr_batch = 2, tr_val = -1;
  double tr_lr = 1e-4, tr_wc = 150, tr_ww = 500;
  st->add_option("--cohort", tr_cohort, "cohort directory")->required();
  st->add_option("--net-config", tr_netcfg, "architecture config (JSON)");
  st->add_option("--out", tr_out, "output checkpoint")->required();
  st->add_option("--history", tr_hist, "history CSV path");
  st->add_option("--epochs", tr_epochs, "training epochs");
  st->add_option("--batch", tr_batch, "batch size");
  st->add_option("--lr", tr_lr, "initial learning rate");
  st->add_option("--val", tr_val, "validation case count (default n/5)");
  st->add_option("--window-center", tr_wc, "window center (HU)");
  st->add_option("--window-width", tr_ww, "window width (HU)");

  // predict
  auto* sd = app.add_subcommand("predict", "segment a volume with a checkpoint");
  std::string pr_ckpt, pr_in, pr_out, pr_prob;
  double pr_wc = 150, pr_ww = 500;
  sd->add_option("--checkpoint", pr_ckpt, "trained checkpoint")->required();
  sd->add_option("--in", pr_in, "input volume")->required();
  sd->add_option("--out", pr_out, "output binary mask")->required();
  sd->add_option("--prob", pr_prob, "optional probability map output");
  sd->add_option("--window-center", pr_wc, "window center (HU)");
  sd->add_option("--window-width", pr_ww, "window width (HU)");

  // evaluate / report
  auto* se = app.add_subcommand("evaluate", "compare predictions against ground truth");
  auto* sr = app.add_subcommand("report", "evaluate and print the per-case summary");
  std::string ev_pred, ev_gt, ev_out, rp_pred, rp_gt, rp_out;
  se->add_option("--pred", ev_pred, "prediction mask directory")->required();
  se->add_option("--gt", ev_gt, "ground-truth mask directory")->required();
  se->add_option("--out", ev_out, "output CSV")->required();
  sr->add_option("--pred", rp_pred, "prediction mask directory")->required();
  sr->add_option("--gt", rp_gt, "ground-truth mask directory")->required();
  sr->add_option("--out", rp_out, "output CSV")->required();

  // gradcheck
  auto* sg = app.add_subcommand("gradcheck", "gradient checks over all engine ops");
  for (auto* sub : {sp, sq, st, sd, se, sr, sg}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sp->parsed()) return cmd_phantom(ph_n, ph_spec, ph_out, seed, threads);
    if (sq->parsed())
      return cmd_preprocess(pp_in, pp_out, pp_roi, pp_wc, pp_ww, pp_target, seed, threads);
    if (st->parsed())
      return cmd_train(tr_cohort, tr_netcfg, tr_out, tr_hist, tr_epochs, tr_batch,
                       tr_lr, tr_val, tr_wc, tr_ww, seed, threads);
    if (sd->parsed())
      return cmd_predict(pr_ckpt, pr_in, pr_out, pr_prob, pr_wc, pr_ww, seed, threads);
    if (se->parsed()) return cmd_evaluate(ev_pred, ev_gt, ev_out, false, seed, threads);
    if (sr->parsed()) return cmd_evaluate(rp_pred, rp_gt, rp_out, true, seed, threads);
    if (sg->parsed()) return cmd_gradcheck(seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
