#include "lensforge/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lensforge {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void done() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown field");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
  }

  void number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      double x = 0.0;
      number(key, x);
      out = x;
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        throw ConfigError(field(key), "expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void flag(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename F>
  void section(const std::string& key, F&& read) {
    if (const json* v = find(key)) {
      Reader sub(*v, field(key));
      read(sub);
      sub.done();
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

const char* kind_name(AntennaKind kind) {
  return kind == AntennaKind::Single ? "single" : "array2x2";
}

const char* mode_name(FeedMode mode) {
  return mode == FeedMode::PointSource ? "point_source" : "sampled_field";
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.antenna.frequency_ghz > 0.0, "antenna.frequency_ghz", "must be > 0");
  require(c.antenna.substrate.eps_r >= 1.0, "antenna.substrate.eps_r", "must be >= 1");
  require(c.antenna.substrate.height_mm > 0.0, "antenna.substrate.height_mm", "must be > 0");
  require(c.antenna.patch_width_mm.has_value() == c.antenna.patch_length_mm.has_value(),
          c.antenna.patch_width_mm ? "antenna.patch_length_mm" : "antenna.patch_width_mm",
          "patch width and length must be given together");
  if (c.antenna.patch_width_mm) {
    require(*c.antenna.patch_width_mm > 0.0, "antenna.patch_width_mm", "must be > 0");
    require(*c.antenna.patch_length_mm > 0.0, "antenna.patch_length_mm", "must be > 0");
  }
  require(c.antenna.spacing_wavelengths > 0.0, "antenna.spacing_wavelengths", "must be > 0");

  require(c.lens.eps_r > 1.0, "lens.eps_r", "must be > 1");
  require(c.lens.radius_mm > 0.0, "lens.radius_mm", "must be > 0");
  if (c.lens.extension_mm) require(*c.lens.extension_mm >= 0.0, "lens.extension_mm", "must be >= 0");

  const PhaseCenterConfig& pc = c.phasecenter;
  require(pc.delta_theta_deg > 0.0 && pc.delta_theta_deg < 90.0, "phasecenter.delta_theta_deg",
          "must lie in (0, 90)");
  require(pc.plane_z_wavelengths > 0.0, "phasecenter.plane_z_wavelengths", "must be > 0");
  require(pc.grid_n >= 21 && pc.grid_n % 2 == 1, "phasecenter.grid_n", "must be odd and >= 21");
  require(pc.d_step_mm > 0.0, "phasecenter.d_step_mm", "must be > 0");
  require(pc.d_min_mm < pc.d_max_mm, "phasecenter.d_max_mm", "must exceed phasecenter.d_min_mm");
  const double plane_z = pc.plane_z_wavelengths * kSpeedOfLight / c.antenna.frequency_ghz;
  require(pc.d_max_mm < plane_z, "phasecenter.d_max_mm", "must lie below the probe plane");

  require(c.sweep.step_mm > 0.0, "sweep.step_mm", "must be > 0");
  require(c.sweep.d_lo_mm >= 0.0, "sweep.d_lo_mm", "must be >= 0");
  require(c.sweep.d_hi_mm >= c.sweep.d_lo_mm, "sweep.d_hi_mm", "empty range: below sweep.d_lo_mm");

  if (c.pattern.gap_mm) require(*c.pattern.gap_mm >= 0.0, "pattern.gap_mm", "must be >= 0");
  require(c.pattern.theta_step_deg > 0.0 && c.pattern.theta_step_deg <= 5.0,
          "pattern.theta_step_deg", "must lie in (0, 5]");
  require(c.pattern.phi_step_deg > 0.0 && c.pattern.phi_step_deg <= 90.0, "pattern.phi_step_deg",
          "must lie in (0, 90]");

  require(!c.output.directory.empty(), "output.directory", "must not be empty");
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }

  RunConfig c;
  Reader root(doc, "");
  root.section("antenna", [&](Reader& r) {
    std::string kind = kind_name(c.antenna.kind);
    r.text("kind", kind);
    if (kind == "single") {
      c.antenna.kind = AntennaKind::Single;
    } else if (kind == "array2x2") {
      c.antenna.kind = AntennaKind::Array2x2;
    } else {
      throw ConfigError(r.field("kind"), "expected \"single\" or \"array2x2\"");
    }
    r.number("frequency_ghz", c.antenna.frequency_ghz);
    r.section("substrate", [&](Reader& s) {
      s.number("eps_r", c.antenna.substrate.eps_r);
      s.number("height_mm", c.antenna.substrate.height_mm);
    });
    r.number("patch_width_mm", c.antenna.patch_width_mm);
    r.number("patch_length_mm", c.antenna.patch_length_mm);
    r.number("spacing_wavelengths", c.antenna.spacing_wavelengths);
  });
  root.section("lens", [&](Reader& r) {
    r.number("eps_r", c.lens.eps_r);
    r.number("radius_mm", c.lens.radius_mm);
    r.number("extension_mm", c.lens.extension_mm);
  });
  root.section("phasecenter", [&](Reader& r) {
    r.number("delta_theta_deg", c.phasecenter.delta_theta_deg);
    r.number("plane_z_wavelengths", c.phasecenter.plane_z_wavelengths);
    r.count("grid_n", c.phasecenter.grid_n);
    r.number("d_min_mm", c.phasecenter.d_min_mm);
    r.number("d_max_mm", c.phasecenter.d_max_mm);
    r.number("d_step_mm", c.phasecenter.d_step_mm);
  });
  root.section("sweep", [&](Reader& r) {
    r.number("d_lo_mm", c.sweep.d_lo_mm);
    r.number("d_hi_mm", c.sweep.d_hi_mm);
    r.number("step_mm", c.sweep.step_mm);
    std::string mode = mode_name(c.sweep.mode);
    r.text("mode", mode);
    if (mode == "point_source") {
      c.sweep.mode = FeedMode::PointSource;
    } else if (mode == "sampled_field") {
      c.sweep.mode = FeedMode::SampledField;
    } else {
      throw ConfigError(r.field("mode"), "expected \"point_source\" or \"sampled_field\"");
    }
  });
  root.section("pattern", [&](Reader& r) {
    r.number("gap_mm", c.pattern.gap_mm);
    r.number("theta_step_deg", c.pattern.theta_step_deg);
    r.number("phi_step_deg", c.pattern.phi_step_deg);
  });
  root.section("output", [&](Reader& r) {
    r.text("directory", c.output.directory);
    r.flag("emit_plots", c.output.emit_plots);
    r.flag("emit_rays", c.output.emit_rays);
  });
  root.done();

  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const RunConfig& c) {
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json doc = {
      {"antenna",
       {{"kind", kind_name(c.antenna.kind)},
        {"frequency_ghz", c.antenna.frequency_ghz},
        {"substrate",
         {{"eps_r", c.antenna.substrate.eps_r}, {"height_mm", c.antenna.substrate.height_mm}}},
        {"patch_width_mm", opt(c.antenna.patch_width_mm)},
        {"patch_length_mm", opt(c.antenna.patch_length_mm)},
        {"spacing_wavelengths", c.antenna.spacing_wavelengths}}},
      {"lens",
       {{"eps_r", c.lens.eps_r},
        {"radius_mm", c.lens.radius_mm},
        {"extension_mm", opt(c.lens.extension_mm)}}},
      {"phasecenter",
       {{"delta_theta_deg", c.phasecenter.delta_theta_deg},
        {"plane_z_wavelengths", c.phasecenter.plane_z_wavelengths},
        {"grid_n", c.phasecenter.grid_n},
        {"d_min_mm", c.phasecenter.d_min_mm},
        {"d_max_mm", c.phasecenter.d_max_mm},
        {"d_step_mm", c.phasecenter.d_step_mm}}},
      {"sweep",
       {{"d_lo_mm", c.sweep.d_lo_mm},
        {"d_hi_mm", c.sweep.d_hi_mm},
        {"step_mm", c.sweep.step_mm},
        {"mode", mode_name(c.sweep.mode)}}},
      {"pattern",
       {{"gap_mm", opt(c.pattern.gap_mm)},
        {"theta_step_deg", c.pattern.theta_step_deg},
        {"phi_step_deg", c.pattern.phi_step_deg}}},
      {"output",
       {{"directory", c.output.directory},
        {"emit_plots", c.output.emit_plots},
        {"emit_rays", c.output.emit_rays}}}};
  return doc.dump(2) + "\n";
}

WaveSpec wave_of(const RunConfig& c) { return wave_from_frequency(c.antenna.frequency_ghz); }

PatchGeometry patch_of(const RunConfig& c) {
  if (c.antenna.patch_width_mm) {
    return patch_from_dimensions(c.antenna.substrate, *c.antenna.patch_width_mm,
                                 *c.antenna.patch_length_mm);
  }
  return synthesize_patch(wave_of(c), c.antenna.substrate);
}

ArrayAntenna antenna_of(const RunConfig& c) {
  const WaveSpec wave = wave_of(c);
  const PatchGeometry patch = patch_of(c);
  if (c.antenna.kind == AntennaKind::Single) return make_single_patch(wave, c.antenna.substrate, patch);
  return make_array_2x2(wave, c.antenna.substrate, patch, c.antenna.spacing_wavelengths);
}

LensSpec lens_of(const RunConfig& c) {
  if (c.lens.extension_mm) return lens_with_extension(c.lens.radius_mm, c.lens.eps_r, *c.lens.extension_mm);
  return synthesize_lens(c.lens.radius_mm, c.lens.eps_r);
}

PhaseCenterSetup phase_center_setup_of(const RunConfig& c) {
  PhaseCenterSetup s;
  s.delta_theta = deg_to_rad(c.phasecenter.delta_theta_deg);
  s.plane_z_wavelengths = c.phasecenter.plane_z_wavelengths;
  s.grid_n = c.phasecenter.grid_n;
  s.range = ScanRange{c.phasecenter.d_min_mm, c.phasecenter.d_max_mm, c.phasecenter.d_step_mm};
  return s;
}

std::vector<double> sweep_gaps_of(const RunConfig& c) {
  const SweepConfig& s = c.sweep;
  const auto steps = static_cast<std::size_t>(std::floor((s.d_hi_mm - s.d_lo_mm) / s.step_mm + 1e-9));
  std::vector<double> out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(s.d_lo_mm + s.step_mm * static_cast<double>(i));
  return out;
}

}  // namespace lensforge
