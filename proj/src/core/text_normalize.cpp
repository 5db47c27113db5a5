#include "text_normalize.hpp"

#include <sstream>

#include "alphabet.hpp"
#include "binary_io.hpp"
#include "error.hpp"

namespace pfpm {

std::uint64_t SequenceCollection::total_length() const {
  std::uint64_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

std::uint8_t normalize_byte(std::uint8_t c) noexcept {
  switch (c) {
    case 'A': case 'a': return 'A';
    case 'C': case 'c': return 'C';
    case 'G': case 'g': return 'G';
    case 'T': case 't': return 'T';
    default: return 'X';
  }
}

namespace {

void append_normalized(std::string& dst, std::string_view line) {
  for (char c : line) {
    if (c == '\r') continue;
    dst.push_back(static_cast<char>(normalize_byte(static_cast<std::uint8_t>(c))));
  }
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

SequenceCollection normalize(std::istream& in, InputFormat format,
                             std::string source_name) {
  SequenceCollection coll;
  coll.source_name = std::move(source_name);
  const std::string& src = coll.source_name.empty() ? std::string("<input>")
                                                    : coll.source_name;
  std::string line;
  std::uint64_t line_no = 0;
  bool saw_any = false;

  if (format == InputFormat::Plain) {
    while (std::getline(in, line)) {
      ++line_no;
      saw_any = true;
      const auto body = trim_cr(line);
      if (body.empty())
        fail(ErrorKind::Format,
             src + ": empty record at line " + std::to_string(line_no));
      std::string seq;
      seq.reserve(body.size());
      append_normalized(seq, body);
      coll.sequences.push_back(std::move(seq));
    }
    if (!saw_any) fail(ErrorKind::Format, src + ": empty input");
    return coll;
  }

  std::string header;
  bool in_record = false;
  auto close_record = [&] {
    if (!in_record) return;
    if (coll.sequences.back().empty())
      fail(ErrorKind::Format,
           src + ": FASTA record '" + header + "' has no sequence bytes");
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim_cr(line);
    if (!body.empty() && body.front() == '>') {
      close_record();
      header = std::string(body.substr(1));
      coll.sequences.emplace_back();
      in_record = true;
      saw_any = true;
      continue;
    }
    if (body.empty()) continue;
    if (!in_record)
      fail(ErrorKind::Format, src + ": sequence data before the first FASTA "
                                    "header at line " + std::to_string(line_no));
    append_normalized(coll.sequences.back(), body);
  }
  if (!saw_any) fail(ErrorKind::Format, src + ": empty input");
  close_record();
  return coll;
}

SequenceCollection normalize(std::string_view raw, InputFormat format,
                             std::string source_name) {
  std::istringstream in{std::string(raw)};
  return normalize(in, format, std::move(source_name));
}

void write_collection(const SequenceCollection& coll, const std::string& path) {
  auto out = open_output(path);
  write_u64(out, coll.sequences.size());
  for (const auto& s : coll.sequences) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

SequenceCollection read_collection(const std::string& path, DatasetId dataset_id) {
  auto in = open_input(path);
  const auto size = file_size(path);
  SequenceCollection coll;
  coll.dataset_id = dataset_id;
  coll.source_name = path;
  const auto count = read_u64(in, path + " sequence count");
  if (count > size / 8)
    fail(ErrorKind::Format, "'" + path + "' declares an impossible sequence count");
  coll.sequences.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = read_u64(in, path + " sequence length");
    if (len == 0)
      fail(ErrorKind::Format, "'" + path + "' contains an empty sequence");
    if (len > size)
      fail(ErrorKind::Format, "'" + path + "' declares an impossible sequence length");
    std::string s(len, '\0');
    read_exact(in, s, path + " sequence bytes");
    for (char c : s)
      if (!is_text_symbol(static_cast<std::uint8_t>(c)))
        fail(ErrorKind::Format, "'" + path + "' contains a byte outside {A,C,G,T,X}");
    coll.sequences.push_back(std::move(s));
  }
  if (in.peek() != std::char_traits<char>::eof())
    fail(ErrorKind::Format, "'" + path + "' has trailing bytes");
  return coll;
}

}  // namespace pfpm
