#include "tilediff/codec.hpp"

#include "tilediff/resample.hpp"

namespace tilediff {

Codec Codec::boxpool(std::size_t factor) {
    if (factor == 0) throw InvalidArgument("boxpool codec factor must be >= 1");
    return {Kind::boxpool, factor};
}

std::string_view to_string(Codec::Kind kind) {
    return kind == Codec::Kind::identity ? "identity" : "boxpool";
}

Codec::Kind parse_codec_kind(std::string_view name) {
    if (name == "identity") return Codec::Kind::identity;
    if (name == "boxpool") return Codec::Kind::boxpool;
    throw InvalidArgument("unknown codec kind '" + std::string(name) + "'");
}

Grid encode(const Codec& codec, const Grid& pixel) {
    if (codec.kind == Codec::Kind::identity) return pixel;
    return downsample_box(pixel, codec.factor);
}

Grid decode(const Codec& codec, const Grid& latent) {
    if (codec.kind == Codec::Kind::identity) return latent;
    return upsample_bilinear(latent, codec.factor);
}

} // namespace tilediff
