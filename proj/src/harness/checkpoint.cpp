#include "helt/harness/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include <json.hpp>

#include "helt/core/error.hpp"
#include "helt/harness/io.hpp"

namespace helt::harness {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_or_corrupt(const fs::path& path) {
  try {
    return read_file(path.string());
  } catch (const ConfigError&) {
    throw CorruptionError("checkpoint: cannot read '" + path.string() + "'");
  }
}

}  // namespace

std::string encode_params(std::span<const double> values) {
  std::string out(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return out;
}

std::vector<double> decode_params(std::string_view bytes) {
  if (bytes.size() % 8 != 0) throw CorruptionError("checkpoint: blob size is not a multiple of 8");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string save_snapshot(const league::PolicySnapshot& snap, const std::string& dir, const std::string& stem) {
  HELT_EXPECT(snap.params != nullptr, "save_snapshot: snapshot has no parameters");
  const learn::PolicyParams& p = *snap.params;
  HELT_EXPECT(p.data.size() == learn::param_count(p.spec), "save_snapshot: parameter count does not match spec");
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04d", snap.id);
  const std::string name = stem.empty() ? std::string(buf) : stem;
  const fs::path base(dir);
  const std::string blob = encode_params(p.data);
  write_file_atomic((base / (name + ".bin")).string(), blob);

  json tensors = json::array();
  for (const learn::TensorInfo& t : learn::layout(p.spec)) {
    tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"offset", t.offset}});
  }
  const json manifest{{"version", kCheckpointVersion},
                      {"byte_order", "little"},
                      {"id", snap.id},
                      {"role", std::string(league::to_string(snap.role))},
                      {"generation", snap.generation},
                      {"created_step", snap.created_step},
                      {"mode", std::string(enc::to_string(snap.mode))},
                      {"spec",
                       {{"mode", std::string(enc::to_string(p.spec.mode))},
                        {"numeric_dim", p.spec.numeric_dim},
                        {"char_table", p.spec.char_table},
                        {"skill_table", p.spec.skill_table},
                        {"embedding_width", p.spec.embedding_width},
                        {"hidden", p.spec.hidden}}},
                      {"param_count", p.data.size()},
                      {"tensors", tensors},
                      {"blob", name + ".bin"},
                      {"sha256", sha256_hex(blob)}};
  const fs::path manifest_path = base / (name + ".json");
  write_file_atomic(manifest_path.string(), manifest.dump(2) + "\n");
  return manifest_path.string();
}

league::PolicySnapshot load_snapshot(const std::string& manifest_path) {
  const fs::path mpath(manifest_path);
  const std::string text = read_or_corrupt(mpath);
  league::PolicySnapshot snap;
  learn::PolicyParams p;
  std::size_t count = 0;
  std::string blob_name, digest;
  try {
    const json m = json::parse(text);
    if (m.at("version").get<int>() != kCheckpointVersion) throw CorruptionError("checkpoint: unsupported version");
    if (m.at("byte_order").get<std::string>() != "little") throw CorruptionError("checkpoint: unsupported byte order");
    snap.id = m.at("id").get<int>();
    snap.role = league::role_from_string(m.at("role").get<std::string>());
    snap.generation = m.at("generation").get<int>();
    snap.created_step = m.at("created_step").get<std::int64_t>();
    snap.mode = enc::mode_from_string(m.at("mode").get<std::string>());
    const json& s = m.at("spec");
    p.spec.mode = enc::mode_from_string(s.at("mode").get<std::string>());
    p.spec.numeric_dim = s.at("numeric_dim").get<int>();
    p.spec.char_table = s.at("char_table").get<int>();
    p.spec.skill_table = s.at("skill_table").get<int>();
    p.spec.embedding_width = s.at("embedding_width").get<int>();
    p.spec.hidden = s.at("hidden").get<int>();
    count = m.at("param_count").get<std::size_t>();
    blob_name = m.at("blob").get<std::string>();
    digest = m.at("sha256").get<std::string>();
  } catch (const json::exception& e) {
    throw CorruptionError("checkpoint: malformed manifest: " + std::string(e.what()));
  } catch (const ConfigError& e) {
    throw CorruptionError("checkpoint: malformed manifest: " + std::string(e.what()));
  }
  if (count != learn::param_count(p.spec)) throw CorruptionError("checkpoint: param_count does not match spec");
  const std::string blob = read_or_corrupt(mpath.parent_path() / blob_name);
  if (blob.size() != count * 8) {
    throw CorruptionError("checkpoint: blob has " + std::to_string(blob.size()) + " bytes, expected " +
                          std::to_string(count * 8));
  }
  if (sha256_hex(blob) != digest) throw CorruptionError("checkpoint: sha256 mismatch");
  p.data = decode_params(blob);
  snap.params = std::make_shared<const learn::PolicyParams>(std::move(p));
  return snap;
}

}  // namespace helt::harness
