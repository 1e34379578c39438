// Copyright 2026 The tritrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tritrain/coord/store.hpp"

#include <fstream>
#include <sstream>

#include "../csv.hpp"
#include "tritrain/common.hpp"

namespace tritrain::coord {
namespace {

void require(bool available) {
  if (!available) throw StoreError("store unavailable");
}

bool valid_name(const std::string& name) {
  if (name.empty() || name.front() == '/') return false;
  for (std::string_view part : split(name, '/')) {
    if (part.empty() || part == "." || part == "..") return false;
  }
  return true;
}

std::optional<std::string> read_if_exists(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    throw StoreError("cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void require_directory(const std::filesystem::path& root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    throw StoreError("shared directory " + root.string() + " does not exist");
  }
}

}  // namespace

std::optional<StatusEntity> MemoryDatastore::get(const std::string& key) {
  require(available_);
  auto it = entities_.find(key);
  if (it == entities_.end()) return std::nullopt;
  return it->second;
}

void MemoryDatastore::put(const std::string& key, const StatusEntity& entity) {
  require(available_);
  entities_[key] = entity;
}

void MemoryBlobstore::upload(const std::string& name, std::string_view bytes) {
  require(available_);
  if (!valid_name(name)) throw StoreError("invalid blob name '" + name + "'");
  blobs_[name] = std::string(bytes);
}

std::optional<std::string> MemoryBlobstore::download(const std::string& name) {
  require(available_);
  auto it = blobs_.find(name);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

bool MemoryBlobstore::exists(const std::string& name) {
  require(available_);
  return blobs_.contains(name);
}

DirectoryDatastore::DirectoryDatastore(std::filesystem::path root) : dir_(root / "datastore") {
  require_directory(root);
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw StoreError("cannot create " + dir_.string() + ": " + ec.message());
}

std::optional<StatusEntity> DirectoryDatastore::get(const std::string& key) {
  if (!valid_name(key) || key.find('/') != std::string::npos) {
    throw StoreError("invalid entity key '" + key + "'");
  }
  const auto text = read_if_exists(dir_ / key);
  if (!text) return std::nullopt;
  return parse_status(*text);
}

void DirectoryDatastore::put(const std::string& key, const StatusEntity& entity) {
  if (!valid_name(key) || key.find('/') != std::string::npos) {
    throw StoreError("invalid entity key '" + key + "'");
  }
  csv::write_file_atomic(dir_ / key, serialize_status(entity));
}

DirectoryBlobstore::DirectoryBlobstore(std::filesystem::path root) : dir_(root / "blobs") {
  require_directory(root);
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw StoreError("cannot create " + dir_.string() + ": " + ec.message());
}

std::filesystem::path DirectoryBlobstore::path_of(const std::string& name) const {
  if (!valid_name(name)) throw StoreError("invalid blob name '" + name + "'");
  return dir_ / name;
}

void DirectoryBlobstore::upload(const std::string& name, std::string_view bytes) {
  const auto path = path_of(name);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw StoreError("cannot create " + path.parent_path().string() + ": " + ec.message());
  csv::write_file_atomic(path, bytes);
}

std::optional<std::string> DirectoryBlobstore::download(const std::string& name) {
  return read_if_exists(path_of(name));
}

bool DirectoryBlobstore::exists(const std::string& name) {
  std::error_code ec;
  return std::filesystem::is_regular_file(path_of(name), ec);
}

}  // namespace tritrain::coord
