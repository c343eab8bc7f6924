// Command-line front end. Talks to the library only through the C API.
#include <fnmatch.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdl/spdl.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LibError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(spdl_status s) {
  if (s != SPDL_OK) {
    const std::string msg = spdl_last_error();
    throw LibError(msg.empty() ? spdl_status_string(s) : msg);
  }
}

struct ImageFree {
  void operator()(spdl_image* p) const { spdl_image_free(p); }
};
struct DictFree {
  void operator()(spdl_dict* p) const { spdl_dict_free(p); }
};
struct TableFree {
  void operator()(spdl_metrics_table* p) const { spdl_metrics_table_free(p); }
};
using ImagePtr = std::unique_ptr<spdl_image, ImageFree>;
using DictPtr = std::unique_ptr<spdl_dict, DictFree>;
using TablePtr = std::unique_ptr<spdl_metrics_table, TableFree>;

struct RunConfig {
  std::string data_dir;
  std::string out_dir = "out";
  std::size_t patch = 6;
  double overlap = 0.5;
  std::size_t resize = 112;  // 0 keeps the native size
  double mu = 1.0 / 256.0;
  std::vector<std::string> solvers{"FISTA"};
  std::optional<double> eps;
  std::optional<std::uint64_t> max_iter;
  json params = json::object();
  std::string order = "ordered";
  std::uint64_t seed = 0;
  std::size_t atoms = 256;
  std::uint64_t snapshot_every = 0;
  int update_sweeps = 1;
  std::size_t tile_cols = 16;
  std::string split = "test";
  bool timing = true;
};

json to_json(const RunConfig& c) {
  json j;
  j["data_dir"] = c.data_dir;
  j["out"] = c.out_dir;
  j["patch"] = c.patch;
  j["overlap"] = c.overlap;
  j["resize"] = c.resize;
  j["mu"] = c.mu;
  j["solver"] = c.solvers;
  j["eps"] = c.eps ? json(*c.eps) : json(nullptr);
  j["max_iter"] = c.max_iter ? json(*c.max_iter) : json(nullptr);
  j["params"] = c.params;
  j["order"] = c.order;
  j["seed"] = c.seed;
  j["atoms"] = c.atoms;
  j["snapshot_every"] = c.snapshot_every;
  j["update_sweeps"] = c.update_sweeps;
  j["tile_cols"] = c.tile_cols;
  j["split"] = c.split;
  j["timing"] = c.timing;
  return j;
}

void from_json_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config " + path + ": top level must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "data_dir") c.data_dir = v.get<std::string>();
      else if (k == "out") c.out_dir = v.get<std::string>();
      else if (k == "patch") c.patch = v.get<std::size_t>();
      else if (k == "overlap") c.overlap = v.get<double>();
      else if (k == "resize") c.resize = v.get<std::size_t>();
      else if (k == "mu") c.mu = v.get<double>();
      else if (k == "solver") c.solvers = v.is_array() ? v.get<std::vector<std::string>>()
                                                        : std::vector<std::string>{v.get<std::string>()};
      else if (k == "eps") c.eps = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (k == "max_iter") c.max_iter = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
      else if (k == "params") c.params = v;
      else if (k == "order") c.order = v.get<std::string>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "atoms") c.atoms = v.get<std::size_t>();
      else if (k == "snapshot_every") c.snapshot_every = v.get<std::uint64_t>();
      else if (k == "update_sweeps") c.update_sweeps = v.get<int>();
      else if (k == "tile_cols") c.tile_cols = v.get<std::size_t>();
      else if (k == "split") c.split = v.get<std::string>();
      else if (k == "timing") c.timing = v.get<bool>();
      else throw UsageError("config " + path + ": unknown key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

spdl_method parse_method(const std::string& name) {
  spdl_method m;
  check(spdl_method_from_name(name.c_str(), &m));
  return m;
}

void apply_overrides(const RunConfig& c, spdl_solver_options& o) {
  if (c.eps) {
    o.eps_rel = *c.eps;
    if (o.data_residual_tol > 0.0) o.data_residual_tol = *c.eps;
  }
  if (c.max_iter) o.max_iter = *c.max_iter;
  if (!c.params.is_object()) throw UsageError("params must be an object");
  for (auto it = c.params.begin(); it != c.params.end(); ++it) {
    const auto& k = it.key();
    if (!it.value().is_number()) throw UsageError("params." + k + " must be a number");
    const double v = it.value().get<double>();
    if (k == "bb_min") o.bb_min = v;
    else if (k == "bb_max") o.bb_max = v;
    else if (k == "fpc_eta") o.fpc_eta = v;
    else if (k == "fpc_mu0_factor") o.fpc_mu0_factor = v;
    else if (k == "twist_alpha") o.twist_alpha = v;
    else if (k == "twist_beta") o.twist_beta = v;
    else if (k == "twist_c") o.twist_c = v;
    else if (k == "sparsa_window") o.sparsa_window = static_cast<int>(v);
    else if (k == "sparsa_sigma") o.sparsa_sigma = v;
    else if (k == "sparsa_contraction") o.sparsa_contraction = v;
    else if (k == "gscg_sigma") o.gscg_sigma = v;
    else if (k == "gscg_gamma") o.gscg_gamma = v;
    else if (k == "isga_c1") o.isga_c1 = v;
    else if (k == "isga_c2") o.isga_c2 = v;
    else if (k == "data_residual_tol") o.data_residual_tol = v;
    else throw UsageError("unknown solver parameter '" + k + "'");
  }
}

bool is_pnm(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

std::vector<fs::path> list_images(const std::string& dir) {
  if (dir.empty()) throw UsageError("no image directory given");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw UsageError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_pnm(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty()) throw UsageError("no PNM images in " + dir);
  return files;
}

ImagePtr load_image(const fs::path& path, std::size_t resize) {
  spdl_image* raw = nullptr;
  check(spdl_image_read(path.c_str(), &raw));
  ImagePtr img(raw);
  if (resize > 0 && (spdl_image_height(raw) != resize || spdl_image_width(raw) != resize)) {
    spdl_image* out = nullptr;
    check(spdl_image_resize(raw, resize, resize, &out));
    img.reset(out);
  }
  return img;
}

DictPtr load_dict(const std::string& path) {
  spdl_dict* raw = nullptr;
  check(spdl_dict_load(path.c_str(), &raw));
  return DictPtr(raw);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LibError("cannot create " + path.string());
  out << text;
  if (!out) throw LibError("write failed: " + path.string());
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LibError("cannot create directory " + dir + ": " + ec.message());
}

struct SnapshotSink {
  fs::path dir;
  std::vector<std::string> files;
};

spdl_status write_snapshot(size_t stage, const spdl_dict* d, void* user) {
  auto* sink = static_cast<SnapshotSink*>(user);
  char name[32];
  std::snprintf(name, sizeof name, "D%02zu.sdic", stage);
  const spdl_status s = spdl_dict_save(d, (sink->dir / name).c_str());
  if (s == SPDL_OK) sink->files.push_back(name);
  return s;
}

int cmd_learn(const RunConfig& c) {
  const auto files = list_images(c.data_dir);
  std::vector<ImagePtr> images;
  for (const auto& f : files) images.push_back(load_image(f, c.resize));

  spdl_learn_options opts;
  spdl_learn_defaults(&opts);
  if (c.solvers.size() != 1) throw UsageError("learn takes exactly one solver");
  spdl_solver_defaults(parse_method(c.solvers.front()), &opts.solver);
  apply_overrides(c, opts.solver);
  opts.mu = c.mu;
  if (c.order == "ordered") opts.order = SPDL_ORDERED;
  else if (c.order == "random") opts.order = SPDL_RANDOM;
  else throw UsageError("order must be 'ordered' or 'random'");
  opts.seed = c.seed;
  opts.update_sweeps = c.update_sweeps;
  opts.snapshot_every = c.snapshot_every;
  opts.patch = c.patch;
  opts.overlap = c.overlap;

  spdl_dict* d0_raw = nullptr;
  check(spdl_dict_init_dct(c.patch * c.patch, c.atoms, &d0_raw));
  DictPtr d0(d0_raw);

  ensure_dir(c.out_dir);
  SnapshotSink sink{c.out_dir, {}};
  std::vector<const spdl_image*> views;
  for (const auto& im : images) views.push_back(im.get());
  std::vector<size_t> per_image(images.size());
  spdl_learn_report report{};
  check(spdl_learn_online(views.data(), views.size(), d0.get(), &opts, write_snapshot, &sink, per_image.data(),
                          &report));

  const json cfg = to_json(c);
  json manifest;
  manifest["command"] = "learn";
  manifest["config"] = cfg;
  manifest["config_hash"] = hex64(fnv1a(cfg.dump()));
  manifest["images"] = json::array();
  std::size_t total = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    manifest["images"].push_back({{"file", files[i].filename().string()}, {"patches", per_image[i]}});
    total += per_image[i];
  }
  manifest["total_patches"] = total;
  manifest["coded"] = report.coded;
  manifest["skipped"] = report.skipped;
  manifest["snapshots"] = sink.files;
  manifest["dictionary"] = {{"rows", c.patch * c.patch}, {"atoms", c.atoms}, {"init", "dct"}};
  write_text(fs::path(c.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "learned " << sink.files.size() << " snapshots from " << total << " patches (" << report.skipped
            << " skipped) into " << c.out_dir << "\n";
  return 0;
}

spdl_reconstruct_options reconstruct_options(const RunConfig& c, const std::string& solver) {
  spdl_reconstruct_options o;
  spdl_reconstruct_defaults(parse_method(solver), &o);
  apply_overrides(c, o.solver);
  o.mu = c.mu;
  o.patch = c.patch;
  o.overlap = c.overlap;
  return o;
}

void append_csv(const fs::path& path, const spdl_metrics_table* one) {
  // The table writer always emits a header; keep it only for a fresh file.
  const fs::path tmp = path.string() + ".tmp";
  check(spdl_metrics_table_write_csv(one, 0, tmp.c_str()));
  std::ifstream in(tmp);
  std::string header, row, text;
  std::getline(in, header);
  while (std::getline(in, row)) text += row + "\n";
  in.close();
  fs::remove(tmp);
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw LibError("cannot open " + path.string());
  if (fresh) out << header << "\n";
  out << text;
  std::cout << text;
}

int cmd_reconstruct(const RunConfig& c, const std::string& dict_file, const std::string& image_file) {
  if (dict_file.empty() || image_file.empty()) throw UsageError("reconstruct needs --dict and --image");
  const auto dict = load_dict(dict_file);
  const auto img = load_image(image_file, c.resize);
  const std::string stage = fs::path(dict_file).stem().string();
  const std::string image_id = fs::path(image_file).stem().string();
  ensure_dir(c.out_dir);

  spdl_metrics_table* raw = nullptr;
  check(spdl_metrics_table_create(&raw));
  TablePtr table(raw);
  for (const auto& solver : c.solvers) {
    const auto opts = reconstruct_options(c, solver);
    spdl_image* rec_raw = nullptr;
    spdl_metrics m{};
    check(spdl_reconstruct(img.get(), dict.get(), &opts, &rec_raw, &m));
    ImagePtr rec(rec_raw);
    if (!c.timing) m.cpu_patch_mean = m.cpu_image = 0.0;
    const std::string name = spdl_method_name(opts.solver.method);
    check(spdl_image_write(rec.get(), (fs::path(c.out_dir) / (image_id + "_" + stage + "_" + name + ".pgm")).c_str()));
    check(spdl_metrics_table_add(table.get(), name.c_str(), stage.c_str(), image_id.c_str(), c.split.c_str(), &m));
  }
  append_csv(fs::path(c.out_dir) / "metrics.csv", table.get());
  return 0;
}

std::vector<fs::path> glob_files(const std::string& pattern) {
  if (pattern.empty()) throw UsageError("evaluate needs --dicts <glob>");
  const fs::path p(pattern);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  const std::string name_pat = p.filename().string();
  std::vector<fs::path> out;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && fnmatch(name_pat.c_str(), e.path().filename().c_str(), 0) == 0) {
        out.push_back(e.path());
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (out.empty()) throw UsageError("no dictionary matches " + pattern);
  return out;
}

int cmd_evaluate(const RunConfig& c, const std::string& dict_glob, const std::string& eval_dir) {
  const auto dict_files = glob_files(dict_glob);
  const auto image_files = list_images(eval_dir);
  std::vector<DictPtr> dicts;
  for (const auto& f : dict_files) dicts.push_back(load_dict(f.string()));
  std::vector<ImagePtr> images;
  for (const auto& f : image_files) images.push_back(load_image(f, c.resize));
  ensure_dir(c.out_dir);

  spdl_metrics_table* raw = nullptr;
  check(spdl_metrics_table_create(&raw));
  TablePtr table(raw);
  for (const auto& solver : c.solvers) {
    const auto opts = reconstruct_options(c, solver);
    const std::string name = spdl_method_name(opts.solver.method);
    for (std::size_t d = 0; d < dicts.size(); ++d) {
      const std::string stage = dict_files[d].stem().string();
      for (std::size_t i = 0; i < images.size(); ++i) {
        spdl_metrics m{};
        check(spdl_reconstruct(images[i].get(), dicts[d].get(), &opts, nullptr, &m));
        if (!c.timing) m.cpu_patch_mean = m.cpu_image = 0.0;
        const std::string image_id = image_files[i].stem().string();
        check(spdl_metrics_table_add(table.get(), name.c_str(), stage.c_str(), image_id.c_str(), c.split.c_str(), &m));
      }
    }
  }
  const fs::path out(c.out_dir);
  check(spdl_metrics_table_write_csv(table.get(), 0, (out / "metrics.csv").c_str()));
  check(spdl_metrics_table_write_csv(table.get(), 1, (out / "aggregate.csv").c_str()));

  const json cfg = to_json(c);
  json manifest;
  manifest["command"] = "evaluate";
  manifest["config"] = cfg;
  manifest["config_hash"] = hex64(fnv1a(cfg.dump()));
  manifest["dictionaries"] = json::array();
  for (const auto& f : dict_files) manifest["dictionaries"].push_back(f.filename().string());
  manifest["images"] = json::array();
  for (const auto& f : image_files) manifest["images"].push_back(f.filename().string());
  manifest["records"] = spdl_metrics_table_size(table.get());
  manifest["aggregate_rows"] = spdl_metrics_table_groups(table.get());
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << spdl_metrics_table_size(table.get()) << " records, " << spdl_metrics_table_groups(table.get())
            << " aggregate rows written to " << c.out_dir << "\n";
  return 0;
}

int cmd_render(const RunConfig& c, const std::string& dict_file, const std::string& out_file) {
  if (dict_file.empty()) throw UsageError("render-dict needs --dict");
  const auto dict = load_dict(dict_file);
  spdl_image* raw = nullptr;
  const spdl_status s = spdl_dict_render(dict.get(), c.tile_cols, &raw);
  if (s == SPDL_E_ARGUMENT) throw LibError(std::string("config error: ") + spdl_last_error());
  check(s);
  ImagePtr img(raw);
  const fs::path out = out_file.empty() ? fs::path(c.out_dir) / (fs::path(dict_file).stem().string() + ".pgm")
                                        : fs::path(out_file);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  check(spdl_image_write(img.get(), out.c_str()));
  return 0;
}

int cmd_make_corpus(const RunConfig& c, std::uint64_t seed, std::size_t side) {
  ensure_dir(c.out_dir);
  for (std::size_t i = 0; i < spdl_corpus_size(); ++i) {
    spdl_image* raw = nullptr;
    char name[64];
    check(spdl_corpus_image(seed, side, i, &raw, name, sizeof name));
    ImagePtr img(raw);
    check(spdl_image_write(img.get(), (fs::path(c.out_dir) / (std::string(name) + ".pgm")).c_str()));
  }
  return 0;
}

// Flags shared by every verb; applied on top of the JSON config.
struct Flags {
  std::string config;
  std::string out;
  std::string solver;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::size_t patch = 0;
  double overlap = 0.0;
  std::size_t resize = 0;
  std::string order;
  std::string data;
  double eps = 0.0;
  std::uint64_t max_iter = 0;
  bool no_timing = false;
  std::vector<CLI::Option*> opts;
};

void add_common(CLI::App* app, Flags& f) {
  f.opts.push_back(app->add_option("--config", f.config, "JSON run configuration"));
  f.opts.push_back(app->add_option("--out", f.out, "output directory (file for render-dict)"));
  f.opts.push_back(app->add_option("--solver", f.solver, "ISTA, FISTA, FPC-BB, TwIST, SpaRSA, GSCG, ISGA; comma list allowed"));
  f.opts.push_back(app->add_option("--mu", f.mu, "l1 weight"));
  f.opts.push_back(app->add_option("--seed", f.seed, "seed for random draw order"));
  f.opts.push_back(app->add_option("--patch", f.patch, "patch side in pixels"));
  f.opts.push_back(app->add_option("--overlap", f.overlap, "overlap ratio in [0,1)"));
  f.opts.push_back(app->add_option("--resize", f.resize, "resize images to N x N (0 keeps size)"));
  f.opts.push_back(app->add_option("--order", f.order, "ordered | random"));
  f.opts.push_back(app->add_option("--eps", f.eps, "override solver eps_rel"));
  f.opts.push_back(app->add_option("--max-iter", f.max_iter, "override solver iteration cap"));
  f.opts.push_back(app->add_flag("--no-timing", f.no_timing, "write zero CPU times (reproducible CSVs)"));
}

RunConfig build_config(const Flags& f, CLI::App* app) {
  RunConfig c;
  if (!f.config.empty()) from_json_file(f.config, c);
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (given("--out")) c.out_dir = f.out;
  if (given("--solver")) {
    c.solvers.clear();
    std::string s = f.solver;
    std::size_t at = 0;
    while (at <= s.size()) {
      const auto comma = s.find(',', at);
      const auto part = s.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
      if (!part.empty()) c.solvers.push_back(part);
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
  }
  if (given("--mu")) c.mu = f.mu;
  if (given("--seed")) c.seed = f.seed;
  if (given("--patch")) c.patch = f.patch;
  if (given("--overlap")) c.overlap = f.overlap;
  if (given("--resize")) c.resize = f.resize;
  if (given("--order")) c.order = f.order;
  if (given("--eps")) c.eps = f.eps;
  if (given("--max-iter")) c.max_iter = f.max_iter;
  if (f.no_timing) c.timing = false;
  if (c.solvers.empty()) throw UsageError("no solver configured");
  for (const auto& s : c.solvers) {
    spdl_method m;
    if (spdl_method_from_name(s.c_str(), &m) != SPDL_OK) throw UsageError("unknown solver '" + s + "'");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse coding and online dictionary learning for image patches"};
  app.require_subcommand(1);

  Flags lf, rf, ef, df, cf;
  std::string data_dir, dict_file, image_file, dict_glob, eval_dir, render_out;
  std::uint64_t corpus_seed = 2024;
  std::size_t corpus_side = 112, tile_cols = 0;

  auto* learn = app.add_subcommand("learn", "learn dictionary snapshots D00..Dk from a directory of images");
  add_common(learn, lf);
  learn->add_option("--data", data_dir, "directory of PNM training images");

  auto* rec = app.add_subcommand("reconstruct", "reconstruct one image with one dictionary");
  add_common(rec, rf);
  rec->add_option("--dict", dict_file, "SDIC dictionary")->required();
  rec->add_option("--image", image_file, "PNM image")->required();

  auto* eval = app.add_subcommand("evaluate", "evaluate dictionaries x images x solvers");
  add_common(eval, ef);
  eval->add_option("--dicts", dict_glob, "glob for SDIC files, e.g. 'run/D*.sdic'")->required();
  eval->add_option("--eval-dir", eval_dir, "directory of PNM evaluation images")->required();

  auto* render = app.add_subcommand("render-dict", "render dictionary atoms as a PNM mosaic");
  add_common(render, df);
  render->add_option("--dict", dict_file, "SDIC dictionary")->required();
  render->add_option("--tile-cols", tile_cols, "tiles per mosaic row");

  auto* corpus = app.add_subcommand("make-corpus", "write the synthetic mini-corpus");
  add_common(corpus, cf);
  corpus->add_option("--size", corpus_side, "image side in pixels");
  corpus->add_option("--corpus-seed", corpus_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse failure is a usage error
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*learn) {
      RunConfig c = build_config(lf, learn);
      if (!data_dir.empty()) c.data_dir = data_dir;
      return cmd_learn(c);
    }
    if (*rec) return cmd_reconstruct(build_config(rf, rec), dict_file, image_file);
    if (*eval) return cmd_evaluate(build_config(ef, eval), dict_glob, eval_dir);
    if (*render) {
      RunConfig c = build_config(df, render);
      if (tile_cols > 0) c.tile_cols = tile_cols;
      if (render->count("--out") > 0) render_out = df.out;
      return cmd_render(c, dict_file, render_out);
    }
    if (*corpus) {
      RunConfig c = build_config(cf, corpus);
      if (corpus->count("--out") == 0) c.out_dir = "data/minicorpus";
      return cmd_make_corpus(c, corpus_seed, corpus_side);
    }
  } catch (const UsageError& e) {
    std::cerr << "spdl: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spdl: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
