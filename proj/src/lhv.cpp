#include "lhvt/lhv.hpp"

namespace lhvt {

LhvRecord LhvStream::record(std::uint64_t k) const {
    SplitMix64 rng(derive_seed(seed_, k, stream_tag::record));
    LhvRecord rec;
    rec.triplet = sample_triplet(rng);
    rec.u = sqrt3 * rng.next_unit();
    return rec;
}

}  // namespace lhvt
