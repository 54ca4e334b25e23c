#include "atomion/cache.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace atomion {

namespace fs = std::filesystem;

namespace {

std::string to_hex(const unsigned char* p, unsigned n) {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned i = 0; i < n; ++i) os << std::setw(2) << static_cast<int>(p[i]);
  return os.str();
}

struct Digest {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Digest() {
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx); }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx, data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    return to_hex(md, len);
  }
};

// Little-endian primitive I/O.
class Writer {
public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u64(s.size());
    buf_.append(s);
  }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }
  const std::string& bytes() const { return buf_; }

private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string buf_;
};

class Reader {
public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == buf_.size(); }

private:
  void need(std::uint64_t n) const {
    if (n > buf_.size() - pos_) throw std::runtime_error("truncated cache file");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string buf_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[8] = {'A', 'T', 'M', 'N', 'E', 'I', 'G', '\0'};

void write_params(Writer& w, const ModelParams& p) {
  for (double v : {p.kappa, p.v0, p.gamma, p.g, p.beta, p.eta, p.l_a}) w.f64(v);
  w.i32(p.n_atoms);
  w.u32(static_cast<std::uint32_t>(p.contact));
}

ModelParams read_params(Reader& r) {
  ModelParams p;
  for (double* v : {&p.kappa, &p.v0, &p.gamma, &p.g, &p.beta, &p.eta, &p.l_a}) *v = r.f64();
  p.n_atoms = r.i32();
  p.contact = static_cast<ContactScheme>(r.u32());
  return p;
}

struct Header {
  Frame frame;
  std::string hash;
  ModelParams params;
  ProductGrid grid;
  std::size_t states;
};

Header read_header(Reader& r) {
  if (r.raw(8) != std::string(kMagic, 8)) throw std::runtime_error("not a cache file");
  if (r.u32() != EigenCache::kVersion) throw std::runtime_error("cache version mismatch");
  Header h{static_cast<Frame>(r.u32()), r.str(), read_params(r), {}, 0};
  const auto dims = r.u32();
  for (std::uint32_t a = 0; a < dims; ++a) {
    const double extent = r.f64();
    const auto n = r.u64();
    h.grid.axes.push_back(make_grid(extent, n));
  }
  h.states = r.u64();
  return h;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Digest d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    d.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

std::string CacheKey::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17) << "v" << EigenCache::kVersion << ";frame=" << to_string(frame)
     << ";kappa=" << params.kappa << ";v0=" << params.v0 << ";gamma=" << params.gamma
     << ";g=" << params.g << ";beta=" << params.beta << ";eta=" << params.eta << ";l_a=" << params.l_a
     << ";n=" << params.n_atoms << ";contact=" << to_string(params.contact) << ";grid=";
  for (const auto& a : grid.axes) os << a.extent() << 'x' << a.size() << ',';
  os << ";states=" << states << ";tol=" << tolerance;
  return os.str();
}

std::string CacheKey::hash() const { return sha256_hex(canonical()); }

std::string CacheKey::filename() const { return to_string(frame) + "-" + hash().substr(0, 16) + ".eig"; }

EigenCache::EigenCache(fs::path root) : root_(std::move(root)) {}

std::optional<CacheEntry> EigenCache::load(const CacheKey& key) const {
  const fs::path path = root_ / key.filename();
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    Reader r(slurp(path));
    Header h = read_header(r);
    if (h.hash != key.hash() || h.frame != key.frame || !(h.grid == key.grid)) return std::nullopt;
    CacheEntry e;
    e.record.params = h.params;
    e.record.frame = h.frame;
    e.record.grid = h.grid;
    for (std::size_t s = 0; s < h.states; ++s) {
      e.record.energies.push_back(r.f64());
      e.record.parity.push_back(r.i32());
      e.record.exchange.push_back(r.i32());
      e.record.cluster.push_back(r.i32());
      e.record.residuals.push_back(r.f64());
      e.record.iterations.push_back(r.u64());
      WaveFn w;
      w.frame = h.frame;
      w.grid = h.grid;
      w.parity = e.record.parity.back();
      w.exchange = e.record.exchange.back();
      const auto n = r.u64();
      if (n != h.grid.size()) throw std::runtime_error("amplitude size mismatch");
      w.amplitude.resize(n);
      for (auto& v : w.amplitude) v = r.f64();
      e.states.push_back(std::move(w));
    }
    if (!r.done()) throw std::runtime_error("trailing bytes");
    return e;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void EigenCache::store(const CacheKey& key, const CacheEntry& entry) const {
  fs::create_directories(root_);
  Writer w;
  w.raw(kMagic, 8);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(key.frame));
  w.str(key.hash());
  write_params(w, key.params);
  w.u32(static_cast<std::uint32_t>(key.grid.dims()));
  for (const auto& a : key.grid.axes) {
    w.f64(a.extent());
    w.u64(a.size());
  }
  w.u64(entry.states.size());
  for (std::size_t s = 0; s < entry.states.size(); ++s) {
    w.f64(entry.record.energies[s]);
    w.i32(entry.record.parity[s]);
    w.i32(entry.record.exchange[s]);
    w.i32(s < entry.record.cluster.size() ? entry.record.cluster[s] : static_cast<int>(s));
    w.f64(entry.record.residuals[s]);
    w.u64(entry.record.iterations[s]);
    w.u64(entry.states[s].amplitude.size());
    for (double v : entry.states[s].amplitude) w.f64(v);
  }
  // Write then rename so concurrent readers never see a partial file.
  const fs::path final_path = root_ / key.filename();
  fs::path tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  }
  fs::rename(tmp, final_path);
}

std::vector<CacheListing> EigenCache::list() const {
  std::vector<CacheListing> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  for (const auto& de : fs::directory_iterator(root_)) {
    if (de.path().extension() != ".eig") continue;
    try {
      Reader r(slurp(de.path()));
      const Header h = read_header(r);
      out.push_back({de.path(), h.frame, h.hash, h.params.g, h.params.beta, h.states, de.file_size()});
    } catch (const std::exception&) {
      continue;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return out;
}

std::size_t EigenCache::remove(const std::string& prefix) const {
  std::size_t n = 0;
  for (const auto& e : list())
    if (e.hash.compare(0, prefix.size(), prefix) == 0 && fs::remove(e.path)) ++n;
  return n;
}

std::string default_cache_root() {
  if (const char* env = std::getenv("ATOMION_CACHE"); env && *env) return env;
  return ".atomion-cache";
}

}  // namespace atomion
