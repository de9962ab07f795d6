#include "reportcert/stack_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "reportcert/errors.hpp"

namespace reportcert {

namespace {

constexpr std::array<char, 4> kMagic = {'V', 'S', 'T', 'K'};
constexpr std::uint16_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "stack io assumes a little-endian host");
static_assert(sizeof(float) == 4);

template <typename T>
T read_le(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw StackFormatError(std::string("stack file truncated while reading ") + what);
  return value;
}

}  // namespace

ReconstructionStack read_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stack file: " + path.string());

  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()))
    throw StackFormatError("stack file truncated while reading magic");
  if (magic != kMagic)
    throw StackFormatError("bad magic in stack file " + path.string() +
                           " (expected \"VSTK\")");
  const auto version = read_le<std::uint16_t>(in, "version");
  if (version != kVersion)
    throw StackFormatError("unsupported stack version " + std::to_string(version));

  ReconstructionStack stack;
  stack.t = read_le<std::uint32_t>(in, "T");
  stack.c = read_le<std::uint32_t>(in, "C");
  stack.h = read_le<std::uint32_t>(in, "H");
  stack.w = read_le<std::uint32_t>(in, "W");
  if (stack.c == 0 || stack.h == 0 || stack.w == 0)
    throw ShapeMismatch("stack shape has a zero dimension");
  if (stack.t < 2)
    throw ShapeMismatch("stack shape declares T = " + std::to_string(stack.t) +
                        ", need T >= 2");

  const std::size_t count =
      std::size_t{stack.t} * stack.c * stack.h * stack.w;
  stack.data.resize(count);
  if (!in.read(reinterpret_cast<char*>(stack.data.data()),
               static_cast<std::streamsize>(count * sizeof(float))))
    throw StackFormatError("stack file truncated: expected " +
                           std::to_string(count) + " floats");
  char extra;
  if (in.read(&extra, 1))
    throw StackFormatError("trailing bytes after stack data");
  return stack;
}

void write_stack(const std::filesystem::path& path, const ReconstructionStack& stack) {
  const std::size_t count =
      std::size_t{stack.t} * stack.c * stack.h * stack.w;
  if (stack.data.size() != count)
    throw ShapeMismatch("stack data does not match its declared shape");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  for (std::uint32_t dim : {stack.t, stack.c, stack.h, stack.w})
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  out.write(reinterpret_cast<const char*>(stack.data.data()),
            static_cast<std::streamsize>(stack.data.size() * sizeof(float)));
  if (!out) throw IoError("failed writing stack file: " + path.string());
}

}  // namespace reportcert
