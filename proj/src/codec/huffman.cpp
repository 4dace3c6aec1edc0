#include "stegbench/codec/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "stegbench/error.hpp"

namespace stegbench::codec {

std::uint64_t quantize_probability(double p) {
  const double scaled = std::round(p * 0x1.0p40);
  return scaled < 1.0 ? 1 : static_cast<std::uint64_t>(scaled);
}

namespace {

struct Node {
  std::uint64_t weight;
  lm::TokenId min_token;
  int child[2] = {-1, -1};
  int leaf = -1;
};

}  // namespace

std::vector<Bits> huffman_codes(std::span<const lm::Entry> pool) {
  if (pool.empty()) throw Error(ErrorCode::InvalidParams, "empty Huffman pool");
  std::vector<Bits> codes(pool.size());
  if (pool.size() == 1) return codes;

  std::vector<Node> nodes;
  nodes.reserve(pool.size() * 2);
  using Key = std::pair<std::uint64_t, int>;  // (weight, creation index)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Node leaf{quantize_probability(pool[i].prob), pool[i].token};
    leaf.leaf = static_cast<int>(i);
    nodes.push_back(leaf);
    heap.emplace(leaf.weight, static_cast<int>(i));
  }
  while (heap.size() > 1) {
    const int a = heap.top().second;
    heap.pop();
    const int b = heap.top().second;
    heap.pop();
    const Node& na = nodes[static_cast<std::size_t>(a)];
    const Node& nb = nodes[static_cast<std::size_t>(b)];
    Node parent{na.weight + nb.weight, std::min(na.min_token, nb.min_token)};
    const bool a_first = std::tie(nb.weight, na.min_token) < std::tie(na.weight, nb.min_token);
    parent.child[0] = a_first ? a : b;
    parent.child[1] = a_first ? b : a;
    nodes.push_back(parent);
    heap.emplace(parent.weight, static_cast<int>(nodes.size() - 1));
  }

  struct Frame {
    int node;
    Bits prefix;
  };
  std::vector<Frame> stack{{heap.top().second, {}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const Node& node = nodes[static_cast<std::size_t>(f.node)];
    if (node.leaf >= 0) {
      codes[static_cast<std::size_t>(node.leaf)] = std::move(f.prefix);
      continue;
    }
    for (int bit = 1; bit >= 0; --bit) {
      Bits prefix = f.prefix;
      prefix.push_back(static_cast<std::uint8_t>(bit));
      stack.push_back({node.child[bit], std::move(prefix)});
    }
  }
  return codes;
}

}  // namespace stegbench::codec
