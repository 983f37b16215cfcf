// JSON text formats for algebras, manifolds, bundles and connections.
//
// References inside bundle and connection files ("algebra", "manifold",
// "bundle") may be inline objects, fixture names, or paths relative to the
// referring file.
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "algebroid/connection.hpp"

namespace algebroid::io {

using json = nlohmann::json;

json to_json(const LieAlgebra& g);
json to_json(const ChartedManifold& m);
json to_json(const Trivialization& t);
json to_json(const ConnectionForm& c);

LieAlgebra algebra_from_json(const json& j);
ChartedManifold manifold_from_json(const json& j);
Trivialization bundle_from_json(const json& j, const std::filesystem::path& base_dir = {});
ConnectionForm connection_from_json(const json& j, const std::filesystem::path& base_dir = {});

/// Throws InputError when the file is missing or not valid JSON.
json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const json& j);

/// A file path, or a fixture name with or without a ".json" suffix.
LieAlgebra load_algebra(const std::string& ref, const std::filesystem::path& base_dir = {});
ChartedManifold load_manifold(const std::string& ref, const std::filesystem::path& base_dir = {});
Trivialization load_bundle(const std::string& ref, const std::filesystem::path& base_dir = {});
ConnectionForm load_connection(const std::string& ref, const std::filesystem::path& base_dir = {});

}  // namespace algebroid::io
