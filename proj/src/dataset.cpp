#include "saak/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "saak/binary_io.hpp"

namespace saak {
namespace {

constexpr int kCifarSide = 32;
constexpr int kCifarChannels = 3;
constexpr std::size_t kCifarPlane = 1024;
constexpr std::size_t kCifarRecord = 1 + kCifarPlane * kCifarChannels;
constexpr std::uint32_t kTensorVersion = 1;

}  // namespace

LabeledImages load_cifar10_batch(const std::filesystem::path& path) {
    const auto bytes = io::read_file(path);
    if (bytes.size() % kCifarRecord != 0)
        throw std::runtime_error(path.string() + ": size " + std::to_string(bytes.size()) +
                                 " is not a multiple of " + std::to_string(kCifarRecord) +
                                 "-byte records");
    const std::size_t n = bytes.size() / kCifarRecord;
    LabeledImages out;
    out.images.reserve(n);
    out.labels.reserve(n);
    std::vector<std::uint8_t> interleaved(kCifarPlane * kCifarChannels);
    for (std::size_t r = 0; r < n; ++r) {
        const std::uint8_t* rec = bytes.data() + r * kCifarRecord;
        const int label = rec[0];
        if (label >= 10)
            throw std::runtime_error(path.string() + ": record " + std::to_string(r) +
                                     " has label " + std::to_string(label));
        // planar R,G,B -> channel-fastest
        for (std::size_t p = 0; p < kCifarPlane; ++p)
            for (int c = 0; c < kCifarChannels; ++c)
                interleaved[p * kCifarChannels + c] = rec[1 + c * kCifarPlane + p];
        out.images.push_back(
            normalize_pixels(interleaved, kCifarSide, kCifarSide, kCifarChannels));
        out.labels.push_back(label);
    }
    return out;
}

void write_cifar10_batch(const std::filesystem::path& path, const LabeledImages& data) {
    if (data.images.size() != data.labels.size())
        throw std::invalid_argument("cifar writer: images/labels size mismatch");
    std::vector<std::uint8_t> bytes;
    bytes.reserve(data.images.size() * kCifarRecord);
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const auto& img = data.images[i];
        if (img.height != kCifarSide || img.width != kCifarSide ||
            img.channels != kCifarChannels)
            throw std::invalid_argument("cifar writer: images must be 32x32x3");
        if (data.labels[i] < 0 || data.labels[i] >= 10)
            throw std::invalid_argument("cifar writer: label out of range");
        bytes.push_back(static_cast<std::uint8_t>(data.labels[i]));
        const auto raw = denormalize_clamp(img);
        bytes.resize(bytes.size() + kCifarPlane * kCifarChannels);
        std::uint8_t* rec = bytes.data() + bytes.size() - kCifarPlane * kCifarChannels;
        for (std::size_t p = 0; p < kCifarPlane; ++p)
            for (int c = 0; c < kCifarChannels; ++c)
                rec[c * kCifarPlane + p] = raw[p * kCifarChannels + c];
    }
    io::atomic_write(path, bytes);
}

void write_tensor(const std::filesystem::path& path, const RawTensor& t) {
    std::size_t expect = 1;
    for (auto d : t.dims) {
        if (d == 0) throw std::invalid_argument("tensor writer: zero dimension");
        expect *= d;
    }
    if (t.dims.empty() || t.data.size() != expect)
        throw std::invalid_argument("tensor writer: payload does not match dims");
    io::ByteWriter w;
    w.raw("STNS", 4);
    w.u32(kTensorVersion);
    w.u32(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    w.f64_array(t.data);
    io::atomic_write(path, w.bytes);
}

void write_tensor(const std::filesystem::path& path, const ImageTensor& t) {
    RawTensor raw;
    raw.dims = {static_cast<std::uint32_t>(t.height), static_cast<std::uint32_t>(t.width),
                static_cast<std::uint32_t>(t.channels)};
    raw.data = t.data;
    write_tensor(path, raw);
}

RawTensor read_tensor(const std::filesystem::path& path) {
    const auto bytes = io::read_file(path);
    io::ByteReader r(bytes);
    char magic[4];
    r.raw(magic, 4);
    if (std::string(magic, 4) != "STNS")
        throw std::runtime_error(path.string() + ": not a tensor file (bad magic)");
    if (r.u32() != kTensorVersion)
        throw std::runtime_error(path.string() + ": unsupported tensor version");
    const auto rank = r.u32();
    if (rank == 0 || rank > 8)
        throw std::runtime_error(path.string() + ": implausible tensor rank " +
                                 std::to_string(rank));
    RawTensor t;
    std::size_t expect = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        t.dims.push_back(r.u32());
        if (t.dims.back() == 0) throw std::runtime_error(path.string() + ": zero dimension");
        expect *= t.dims.back();
    }
    if (r.remaining() != expect * 8)
        throw std::runtime_error(path.string() + ": payload length does not match dims");
    t.data.resize(expect);
    r.f64_array(t.data);
    return t;
}

ImageTensor read_image_tensor(const std::filesystem::path& path) {
    auto raw = read_tensor(path);
    if (raw.dims.size() != 3)
        throw std::runtime_error(path.string() + ": expected a rank-3 image tensor, got rank " +
                                 std::to_string(raw.dims.size()));
    ImageTensor img;
    img.height = static_cast<int>(raw.dims[0]);
    img.width = static_cast<int>(raw.dims[1]);
    img.channels = static_cast<int>(raw.dims[2]);
    img.data = std::move(raw.data);
    return img;
}

void write_labels(const std::filesystem::path& path,
                  const std::map<std::string, int>& labels) {
    nlohmann::json j(labels);
    const auto text = j.dump(2) + "\n";
    io::atomic_write(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::map<std::string, int> read_labels(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    f >> j;
    std::map<std::string, int> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<int>();
    return out;
}

}  // namespace saak
