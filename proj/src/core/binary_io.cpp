#include "binary_io.hpp"

#include <cstring>
#include <filesystem>

#include "error.hpp"

namespace pfpm {

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

void read_exact(std::istream& in, std::span<char> buf, const std::string& what) {
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    fail(ErrorKind::Format, "truncated input while reading " + what);
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
  char b[4];
  read_exact(in, b, what);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
  return v;
}

std::uint64_t read_u64(std::istream& in, const std::string& what) {
  char b[8];
  read_exact(in, b, what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  return out;
}

std::uint64_t file_size(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorKind::Io, "cannot stat '" + path + "': " + ec.message());
  return size;
}

void write_artifact_header(std::ostream& out, const Magic& magic,
                           const ArtifactHeader& header) {
  out.write(magic.data(), magic.size());
  write_u32(out, kFormatVersion);
  write_u32(out, header.params.w);
  write_u64(out, header.params.p);
  write_u64(out, header.params.hash_base);
  write_u64(out, header.params.hash_mod);
  write_u32(out, header.dataset_id);
}

ArtifactHeader read_artifact_header(std::istream& in, const Magic& magic,
                                    const std::string& path) {
  Magic got{};
  read_exact(in, got, path + " magic");
  if (std::memcmp(got.data(), magic.data(), magic.size()) != 0)
    fail(ErrorKind::Format, "'" + path + "' is not a " +
                                std::string(magic.data() + 4, 4) + " file");
  const auto version = read_u32(in, path + " version");
  if (version != kFormatVersion)
    fail(ErrorKind::Format, "'" + path + "' has unsupported format version " +
                                std::to_string(version));
  ArtifactHeader h;
  h.params.w = read_u32(in, path + " header");
  h.params.p = read_u64(in, path + " header");
  h.params.hash_base = read_u64(in, path + " header");
  h.params.hash_mod = read_u64(in, path + " header");
  h.dataset_id = read_u32(in, path + " header");
  return h;
}

}  // namespace pfpm
