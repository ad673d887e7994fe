#include "mpiabi/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mpiabi/constants.hpp"
#include "mpiabi/handles.hpp"

namespace mpiabi {

namespace {

std::string hex_of(std::int64_t value) {
  std::ostringstream os;
  if (value < 0) {
    os << "-0x" << std::hex << std::uppercase << -value;
  } else {
    os << "0x" << std::hex << std::uppercase << value;
  }
  return os.str();
}

std::int64_t parse_hex(std::string_view text) {
  bool neg = !text.empty() && text.front() == '-';
  if (neg) text.remove_prefix(1);
  if (text.substr(0, 2) != "0x")
    throw std::invalid_argument("manifest value lacks 0x prefix");
  text.remove_prefix(2);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("bad manifest hex value");
  return neg ? -v : v;
}

void sort_records(std::vector<ManifestRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) {
              if (a.value != b.value) return a.value < b.value;
              return a.name < b.name;
            });
}

}  // namespace

std::vector<ManifestRecord> standard_manifest() {
  std::vector<ManifestRecord> out;
  for (const PredefinedRow& row : predefined_rows())
    out.push_back({std::string(row.name), std::string(to_string(row.kind)), row.value});
  for (const ConstantDef& def : standard_constant_table())
    out.push_back({std::string(def.name), std::string(to_string(def.family)), def.value});
  AttributeCallbackConstants cb;
  out.push_back({"MPI_NULL_COPY_FN", "AttrCallback", cb.null_copy_fn});
  out.push_back({"MPI_NULL_DELETE_FN", "AttrCallback", cb.null_delete_fn});
  out.push_back({"MPI_DUP_FN", "AttrCallback", cb.dup_fn});
  sort_records(out);
  return out;
}

std::string emit_manifest(std::vector<ManifestRecord> records) {
  sort_records(records);
  std::string out;
  for (const ManifestRecord& rec : records) {
    out += rec.name;
    out += '\t';
    out += rec.kind;
    out += '\t';
    out += hex_of(rec.value);
    out += '\n';
  }
  return out;
}

std::vector<ManifestRecord> parse_manifest(std::string_view text) {
  std::vector<ManifestRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos)
      throw std::invalid_argument("manifest line needs two tabs: " + std::string(line));
    out.push_back({std::string(line.substr(0, t1)),
                   std::string(line.substr(t1 + 1, t2 - t1 - 1)),
                   parse_hex(line.substr(t2 + 1))});
  }
  return out;
}

std::vector<std::string> diff_manifests(const std::vector<ManifestRecord>& a,
                                        const std::vector<ManifestRecord>& b) {
  std::map<std::string, const ManifestRecord*> am, bm;
  for (const auto& rec : a) am[rec.name] = &rec;
  for (const auto& rec : b) bm[rec.name] = &rec;

  std::vector<std::string> out;
  for (const auto& [name, rec] : am) {
    auto it = bm.find(name);
    if (it == bm.end()) {
      out.push_back("only in A: " + name);
    } else if (*rec != *it->second) {
      out.push_back("differs: " + name + " A=" + hex_of(rec->value) + "/" +
                    rec->kind + " B=" + hex_of(it->second->value) + "/" +
                    it->second->kind);
    }
  }
  for (const auto& [name, rec] : bm)
    if (!am.contains(name)) out.push_back("only in B: " + name);
  return out;
}

}  // namespace mpiabi
