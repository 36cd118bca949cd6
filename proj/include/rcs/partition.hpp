#pragma once

#include <vector>

#include "rcs/types.hpp"

namespace rcs {

struct Block {
    Index begin = 0;
    Index size = 0;
    Index end() const { return begin + size; }
};

// Contiguous split of {0,...,d-1} into N blocks. The first d mod N blocks
// get one extra coordinate.
class BlockPartition {
public:
    BlockPartition(Index d, Index N);

    Index dim() const { return d_; }
    Index count() const { return static_cast<Index>(offsets_.size()) - 1; }
    Block block(Index i) const { return {offsets_[i], offsets_[i + 1] - offsets_[i]}; }
    Index max_block_size() const;
    const std::vector<Index>& offsets() const { return offsets_; }

private:
    Index d_;
    std::vector<Index> offsets_;
};

BlockPartition make_partition(Index d, Index N);

// Concatenates per-block vectors in partition order.
Vector aggregate_blocks(const std::vector<Vector>& blocks, const BlockPartition& partition);

}  // namespace rcs
