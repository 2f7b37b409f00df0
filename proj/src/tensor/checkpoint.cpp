#include "tensor/checkpoint.hpp"

#include "common/error.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace seqdiag::nn {

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'D', 'G', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) raise(Status::DecodeError, "truncated checkpoint: " + path);
    return value;
}

} // namespace

void save_checkpoint(const std::string& path, const std::string& manifest_json,
                     const std::vector<std::pair<std::string, Tensor>>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Status::IoError, "cannot open for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    write_pod<uint32_t>(out, kVersion);
    write_pod<uint64_t>(out, manifest_json.size());
    out.write(manifest_json.data(), static_cast<std::streamsize>(manifest_json.size()));
    write_pod<uint32_t>(out, static_cast<uint32_t>(tensors.size()));
    for (const auto& [name, tensor] : tensors) {
        write_pod<uint32_t>(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod<int64_t>(out, tensor.rows());
        write_pod<int64_t>(out, tensor.cols());
        out.write(reinterpret_cast<const char*>(tensor.values().data()),
                  static_cast<std::streamsize>(tensor.values().size() * sizeof(double)));
    }
    if (!out) raise(Status::IoError, "write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Status::IoError, "cannot open for reading: " + path);

    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        raise(Status::DecodeError, "not a checkpoint file: " + path);
    uint32_t version = read_pod<uint32_t>(in, path);
    if (version != kVersion)
        raise(Status::DecodeError,
              "unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    uint64_t manifest_len = read_pod<uint64_t>(in, path);
    ckpt.manifest_json.resize(manifest_len);
    in.read(ckpt.manifest_json.data(), static_cast<std::streamsize>(manifest_len));
    if (!in) raise(Status::DecodeError, "truncated checkpoint manifest: " + path);

    uint32_t count = read_pod<uint32_t>(in, path);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t name_len = read_pod<uint32_t>(in, path);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(name_len));
        if (!in) raise(Status::DecodeError, "truncated tensor name: " + path);
        int64_t rows = read_pod<int64_t>(in, path);
        int64_t cols = read_pod<int64_t>(in, path);
        if (rows < 1 || cols < 1 || rows * cols > (1LL << 32))
            raise(Status::DecodeError, "implausible tensor shape in " + path);
        std::vector<double> values(static_cast<size_t>(rows * cols));
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!in) raise(Status::DecodeError, "truncated tensor data: " + path);
        ckpt.tensors.emplace_back(std::move(name),
                                  Tensor::from(rows, cols, std::move(values)));
    }
    return ckpt;
}

} // namespace seqdiag::nn
