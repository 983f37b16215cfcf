#include "algebroid/io.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "algebroid/fixtures.hpp"

namespace algebroid::io {

namespace fs = std::filesystem;

namespace {

json mat_json(const Eigen::Ref<const Mat>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) throw InputError(std::string(what) + ": wrong row count");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw InputError(std::string(what) + ": wrong column count");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json field_json(const ChartedManifold& m, const Field& f) {
  json charts = json::array();
  for (int c = 0; c < m.chart_count(); ++c) {
    json nodes = json::array();
    for (int node = 0; node < m.chart(c).node_count(); ++node) nodes.push_back(mat_json(f.mat(c, node)));
    charts.push_back(std::move(nodes));
  }
  return charts;
}

void fill_chart(Field& f, int chart, int node_count, const json& nodes, const char* what) {
  if (!nodes.is_array() || static_cast<int>(nodes.size()) != node_count)
    throw InputError(std::string(what) + ": node count does not match chart " + std::to_string(chart));
  for (int node = 0; node < node_count; ++node) f.mat(chart, node) = mat_from(nodes[node], f.rows(), f.cols(), what);
}

bool is_name_of(const std::string& ref, const std::vector<std::string>& names) {
  return std::find(names.begin(), names.end(), ref) != names.end();
}

std::string strip_json(const std::string& ref) {
  const std::string suffix = ".json";
  if (ref.size() > suffix.size() && ref.compare(ref.size() - suffix.size(), suffix.size(), suffix) == 0)
    return ref.substr(0, ref.size() - suffix.size());
  return ref;
}

/// Resolves a reference to either a JSON document (with its directory) or a fixture name.
struct Resolved {
  std::optional<json> doc;
  fs::path dir;
  std::string fixture;
};

Resolved resolve(const std::string& ref, const fs::path& base_dir, const std::vector<std::string>& fixtures) {
  const fs::path p = base_dir.empty() ? fs::path(ref) : base_dir / ref;
  if (fs::is_regular_file(p)) return {read_file(p), p.parent_path(), {}};
  if (fs::is_regular_file(ref)) return {read_file(ref), fs::path(ref).parent_path(), {}};
  const std::string name = strip_json(fs::path(ref).filename().string());
  if (is_name_of(name, fixtures)) return {std::nullopt, {}, name};
  throw InputError("cannot resolve '" + ref + "' as a file or fixture name");
}

template <typename T, typename FromJson, typename FromName>
T load_ref(const json& j, const fs::path& base_dir, const std::vector<std::string>& names, FromJson from_json,
           FromName from_name) {
  if (j.is_object()) return from_json(j, base_dir);
  if (!j.is_string()) throw InputError("reference must be an object or a string");
  auto r = resolve(j.get<std::string>(), base_dir, names);
  if (r.doc) return from_json(*r.doc, r.dir);
  return from_name(r.fixture);
}

template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON document: ") + e.what());
  }
}

}  // namespace

json to_json(const LieAlgebra& g) {
  const int n = g.dim();
  json c = json::array();
  for (int i = 0; i < n; ++i) {
    json ci = json::array();
    for (int j = 0; j < n; ++j) {
      json cij = json::array();
      for (int k = 0; k < n; ++k) cij.push_back(g.c(i, j, k));
      ci.push_back(std::move(cij));
    }
    c.push_back(std::move(ci));
  }
  return {{"name", g.name()}, {"dim", n}, {"c", std::move(c)}};
}

LieAlgebra algebra_from_json(const json& j) {
  return guarded([&] {
    const int n = j.at("dim").get<int>();
    if (n < 1 || n > kMaxAlgebraDim) throw InputError("algebra dim out of range");
    const json& c = j.at("c");
    std::vector<double> flat;
    if (!c.is_array() || static_cast<int>(c.size()) != n) throw InputError("structure constants: wrong shape");
    for (const auto& ci : c) {
      if (!ci.is_array() || static_cast<int>(ci.size()) != n) throw InputError("structure constants: wrong shape");
      for (const auto& cij : ci) {
        if (!cij.is_array() || static_cast<int>(cij.size()) != n) throw InputError("structure constants: wrong shape");
        for (const auto& v : cij) flat.push_back(v.get<double>());
      }
    }
    return LieAlgebra(j.value("name", std::string("algebra")), n, std::move(flat));
  });
}

json to_json(const ChartedManifold& m) {
  auto box_json = [](const std::vector<Interval>& box) {
    json b = json::array();
    for (const auto& iv : box) b.push_back({iv.lo, iv.hi});
    return b;
  };
  json charts = json::array();
  for (const auto& ch : m.charts())
    charts.push_back({{"box", box_json(ch.box)}, {"resolution", ch.resolution}, {"center", ch.center}});
  json overlaps = json::array();
  for (const auto& o : m.overlaps()) {
    std::vector<double> off(o.map.offset.data(), o.map.offset.data() + o.map.offset.size());
    overlaps.push_back({{"alpha", o.alpha},
                        {"beta", o.beta},
                        {"region", box_json(o.region)},
                        {"map", {{"matrix", mat_json(o.map.matrix)}, {"offset", off}}}});
  }
  return {{"name", m.name()}, {"dim", m.dim()}, {"charts", std::move(charts)}, {"overlaps", std::move(overlaps)}};
}

ChartedManifold manifold_from_json(const json& j) {
  return guarded([&] {
    auto box_from = [](const json& b) {
      std::vector<Interval> box;
      for (const auto& iv : b) {
        if (!iv.is_array() || iv.size() != 2) throw InputError("box entries must be [lo, hi]");
        box.push_back({iv[0].get<double>(), iv[1].get<double>()});
      }
      return box;
    };
    ManifoldSpec spec;
    spec.name = j.value("name", std::string("manifold"));
    spec.dim = j.at("dim").get<int>();
    for (const auto& c : j.at("charts")) {
      Chart ch;
      ch.box = box_from(c.at("box"));
      ch.resolution = c.at("resolution").get<std::vector<int>>();
      ch.center = c.at("center").get<std::vector<int>>();
      spec.charts.push_back(std::move(ch));
    }
    for (const auto& o : j.at("overlaps")) {
      Overlap ov;
      ov.alpha = o.at("alpha").get<int>();
      ov.beta = o.at("beta").get<int>();
      ov.region = box_from(o.at("region"));
      const auto off = o.at("map").at("offset").get<std::vector<double>>();
      ov.map.offset = Eigen::Map<const Vec>(off.data(), static_cast<Eigen::Index>(off.size()));
      ov.map.matrix = mat_from(o.at("map").at("matrix"), spec.dim, spec.dim, "overlap map matrix");
      spec.overlaps.push_back(std::move(ov));
    }
    return build_manifold(std::move(spec));
  });
}

json to_json(const Trivialization& t) {
  return {{"algebra", to_json(t.algebra)}, {"manifold", to_json(t.manifold)}, {"frames", field_json(t.manifold, t.frames)}};
}

Trivialization bundle_from_json(const json& j, const fs::path& base_dir) {
  return guarded([&] {
    auto g = load_ref<LieAlgebra>(
        j.at("algebra"), base_dir, algebra_fixture_names(), [](const json& d, const fs::path&) { return algebra_from_json(d); },
        [](const std::string& n) { return fixture_algebra(n); });
    auto m = load_ref<ChartedManifold>(
        j.at("manifold"), base_dir, manifold_fixture_names(),
        [](const json& d, const fs::path&) { return manifold_from_json(d); },
        [](const std::string& n) { return fixture_manifold(n); });
    const int n = g.dim();
    Trivialization t{g, m, Field(m, n, n)};
    const json& frames = j.at("frames");
    if (!frames.is_array() || static_cast<int>(frames.size()) != m.chart_count())
      throw InputError("frames: one entry per chart required");
    for (int c = 0; c < m.chart_count(); ++c) fill_chart(t.frames, c, m.chart(c).node_count(), frames[c], "frames");
    return t;
  });
}

json to_json(const ConnectionForm& c) {
  const auto& m = c.bundle.manifold;
  json omega = json::array();
  for (int ch = 0; ch < m.chart_count(); ++ch) {
    json axes = json::array();
    for (const auto& w : c.omega) {
      json nodes = json::array();
      for (int node = 0; node < m.chart(ch).node_count(); ++node) nodes.push_back(mat_json(w.mat(ch, node)));
      axes.push_back(std::move(nodes));
    }
    omega.push_back(std::move(axes));
  }
  return {{"bundle", to_json(c.bundle)}, {"omega", std::move(omega)}};
}

ConnectionForm connection_from_json(const json& j, const fs::path& base_dir) {
  return guarded([&] {
    auto t = load_ref<Trivialization>(
        j.at("bundle"), base_dir, bundle_fixture_names(),
        [](const json& d, const fs::path& dir) { return bundle_from_json(d, dir); },
        [](const std::string& n) { return fixture_bundle(n); });
    ConnectionForm c = zero_connection(t);
    const auto& m = t.manifold;
    const json& omega = j.at("omega");
    if (!omega.is_array() || static_cast<int>(omega.size()) != m.chart_count())
      throw InputError("omega: one entry per chart required");
    for (int ch = 0; ch < m.chart_count(); ++ch) {
      if (!omega[ch].is_array() || static_cast<int>(omega[ch].size()) != m.dim())
        throw InputError("omega: one component per base axis required");
      for (int i = 0; i < m.dim(); ++i) fill_chart(c.omega[i], ch, m.chart(ch).node_count(), omega[ch][i], "omega");
    }
    return c;
  });
}

json read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

LieAlgebra load_algebra(const std::string& ref, const fs::path& base_dir) {
  auto r = resolve(ref, base_dir, algebra_fixture_names());
  return r.doc ? algebra_from_json(*r.doc) : fixture_algebra(r.fixture);
}

ChartedManifold load_manifold(const std::string& ref, const fs::path& base_dir) {
  auto r = resolve(ref, base_dir, manifold_fixture_names());
  return r.doc ? manifold_from_json(*r.doc) : fixture_manifold(r.fixture);
}

Trivialization load_bundle(const std::string& ref, const fs::path& base_dir) {
  auto r = resolve(ref, base_dir, bundle_fixture_names());
  return r.doc ? bundle_from_json(*r.doc, r.dir) : fixture_bundle(r.fixture);
}

ConnectionForm load_connection(const std::string& ref, const fs::path& base_dir) {
  auto r = resolve(ref, base_dir, connection_fixture_names());
  return r.doc ? connection_from_json(*r.doc, r.dir) : fixture_connection(r.fixture);
}

}  // namespace algebroid::io
