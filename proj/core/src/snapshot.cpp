#include "tdho/snapshot.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include <json.hpp>

#include "tdho/errors.hpp"

namespace tdho {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return {buf.data(), r.ptr};
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

void write_snapshot(const Wavefunction2D& psi, const std::filesystem::path& csv_path, const std::string& hash) {
  std::ofstream csv(csv_path);
  if (!csv) throw InputError("cannot write " + csv_path.string());
  csv << "# config_hash " << hash << "\n";
  csv << "x1,x2,re,im\n";
  const Grid2D& g = psi.grid;
  for (std::size_t i = 0; i < g.n1; ++i)
    for (std::size_t j = 0; j < g.n2; ++j) {
      const auto v = psi.at(i, j);
      csv << format_double(g.x1(i)) << ',' << format_double(g.x2(j)) << ',' << format_double(v.real()) << ','
          << format_double(v.imag()) << '\n';
    }
  if (!csv) throw InputError("failed writing " + csv_path.string());

  nlohmann::ordered_json meta;
  meta["config_hash"] = hash;
  meta["time"] = psi.time;
  meta["norm"] = psi.norm();
  meta["grid"] = {{"n1", g.n1}, {"n2", g.n2}, {"half_width1", g.half_width1}, {"half_width2", g.half_width2},
                  {"dx1", g.dx1()}, {"dx2", g.dx2()}};
  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream js(json_path);
  if (!js) throw InputError("cannot write " + json_path.string());
  js << meta.dump(2) << '\n';
}

}  // namespace tdho
