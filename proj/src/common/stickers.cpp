#include "narravine/common/stickers.hpp"

#include <fstream>

#include "narravine/common/error.hpp"

namespace narravine {

void to_json(Json& j, const StickerEntry& e) {
  j = Json{{"id", e.id}, {"description", e.description}, {"head_noun", e.head_noun},
           {"category", e.category}, {"asset", e.asset}};
}

void from_json(const Json& j, StickerEntry& e) {
  j.at("id").get_to(e.id);
  e.description = j.value("description", "");
  e.head_noun = j.value("head_noun", "");
  e.category = j.value("category", "");
  e.asset = j.value("asset", "");
}

StickerManifest::StickerManifest(std::vector<StickerEntry> entries) : entries_(std::move(entries)) {}

StickerManifest StickerManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read sticker manifest " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw IoFailure("sticker manifest " + path + ": " + e.what());
  }
  const Json& list = j.is_object() ? j.at("stickers") : j;
  return StickerManifest(list.get<std::vector<StickerEntry>>());
}

const StickerEntry* StickerManifest::find(const std::string& id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string StickerManifest::head_noun(const std::string& id) const {
  if (const auto* e = find(id); e && !e->head_noun.empty()) return e->head_noun;
  const auto pos = id.rfind('_');
  return pos == std::string::npos ? id : id.substr(pos + 1);
}

std::vector<std::string> StickerManifest::ids() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.id);
  return out;
}

}  // namespace narravine
