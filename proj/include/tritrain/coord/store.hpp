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

#ifndef TRITRAIN_COORD_STORE_HPP_
#define TRITRAIN_COORD_STORE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tritrain/coord/status.hpp"

namespace tritrain::coord {

/// Key to status-entity map. Puts are atomic and a get sees the latest
/// completed put. Failures raise StoreError.
class Datastore {
 public:
  virtual ~Datastore() = default;
  virtual std::optional<StatusEntity> get(const std::string& key) = 0;
  virtual void put(const std::string& key, const StatusEntity& entity) = 0;
};

/// Name to bytes map with atomic uploads.
class Blobstore {
 public:
  virtual ~Blobstore() = default;
  virtual void upload(const std::string& name, std::string_view bytes) = 0;
  virtual std::optional<std::string> download(const std::string& name) = 0;
  virtual bool exists(const std::string& name) = 0;
};

class MemoryDatastore final : public Datastore {
 public:
  std::optional<StatusEntity> get(const std::string& key) override;
  void put(const std::string& key, const StatusEntity& entity) override;
  /// While unavailable every call raises StoreError.
  void set_available(bool available) { available_ = available; }

 private:
  std::map<std::string, StatusEntity> entities_;
  bool available_ = true;
};

class MemoryBlobstore final : public Blobstore {
 public:
  void upload(const std::string& name, std::string_view bytes) override;
  std::optional<std::string> download(const std::string& name) override;
  bool exists(const std::string& name) override;
  void set_available(bool available) { available_ = available; }

 private:
  std::map<std::string, std::string> blobs_;
  bool available_ = true;
};

/// One file per entity under `<root>/datastore/`, replaced via rename.
class DirectoryDatastore final : public Datastore {
 public:
  explicit DirectoryDatastore(std::filesystem::path root);
  std::optional<StatusEntity> get(const std::string& key) override;
  void put(const std::string& key, const StatusEntity& entity) override;

 private:
  std::filesystem::path dir_;
};

/// Blob `a/b/c` lives at `<root>/blobs/a/b/c`, written to a temp file and
/// renamed so readers never observe a partial blob.
class DirectoryBlobstore final : public Blobstore {
 public:
  explicit DirectoryBlobstore(std::filesystem::path root);
  void upload(const std::string& name, std::string_view bytes) override;
  std::optional<std::string> download(const std::string& name) override;
  bool exists(const std::string& name) override;

 private:
  std::filesystem::path path_of(const std::string& name) const;
  std::filesystem::path dir_;
};

}  // namespace tritrain::coord

#endif  // TRITRAIN_COORD_STORE_HPP_
