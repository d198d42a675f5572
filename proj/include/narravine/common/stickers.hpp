#pragma once

#include <string>
#include <vector>

#include "narravine/common/json.hpp"

namespace narravine {

struct StickerEntry {
  std::string id;
  std::string description;
  std::string head_noun;
  std::string category;
  std::string asset;
};

class StickerManifest {
 public:
  StickerManifest() = default;
  explicit StickerManifest(std::vector<StickerEntry> entries);

  static StickerManifest load(const std::string& path);

  const std::vector<StickerEntry>& entries() const { return entries_; }
  const StickerEntry* find(const std::string& id) const;
  // Falls back to the last '_' segment of the id.
  std::string head_noun(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::vector<StickerEntry> entries_;
};

void to_json(Json& j, const StickerEntry& e);
void from_json(const Json& j, StickerEntry& e);

}  // namespace narravine
