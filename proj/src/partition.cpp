#include "rcs/partition.hpp"

#include <string>

#include "rcs/errors.hpp"

namespace rcs {

BlockPartition::BlockPartition(Index d, Index N) : d_(d) {
    if (d < 1) throw PartitionError("dimension must be positive");
    if (N < 1 || N > d) {
        throw PartitionError("block count " + std::to_string(N) + " not in [1, " +
                             std::to_string(d) + "]");
    }
    const Index base = d / N;
    const Index extra = d % N;
    offsets_.resize(static_cast<std::size_t>(N) + 1);
    offsets_[0] = 0;
    for (Index i = 0; i < N; ++i) offsets_[i + 1] = offsets_[i] + base + (i < extra ? 1 : 0);
}

Index BlockPartition::max_block_size() const {
    Index m = 0;
    for (Index i = 0; i < count(); ++i) m = std::max(m, block(i).size);
    return m;
}

BlockPartition make_partition(Index d, Index N) { return BlockPartition(d, N); }

Vector aggregate_blocks(const std::vector<Vector>& blocks, const BlockPartition& partition) {
    if (static_cast<Index>(blocks.size()) != partition.count()) {
        throw DimensionError("expected " + std::to_string(partition.count()) + " blocks, got " +
                             std::to_string(blocks.size()));
    }
    Vector out(partition.dim());
    for (Index i = 0; i < partition.count(); ++i) {
        const Block b = partition.block(i);
        if (blocks[i].size() != b.size) {
            throw DimensionError("block " + std::to_string(i) + " has length " +
                                 std::to_string(blocks[i].size()) + ", expected " +
                                 std::to_string(b.size));
        }
        out.segment(b.begin, b.size) = blocks[i];
    }
    return out;
}

}  // namespace rcs
