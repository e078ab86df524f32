#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hjb {

/**
 * Binary min-heap of (value, node) keyed on value, ties broken by the
 * smaller node index. A node -> slot map gives O(log n) decrease-key and
 * keeps each node in the heap at most once.
 */
class ConsideredHeap {
public:
    struct Entry {
        double value;
        std::size_t node;
    };

    explicit ConsideredHeap(std::size_t node_count = 0) : slot_(node_count, kAbsent) {}

    void reset(std::size_t node_count) {
        heap_.clear();
        slot_.assign(node_count, kAbsent);
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    bool contains(std::size_t node) const { return slot_[node] != kAbsent; }
    double value_of(std::size_t node) const { return heap_[slot_[node]].value; }
    const Entry& top() const { return heap_.front(); }

    void push(std::size_t node, double value) {
        if (contains(node)) throw std::logic_error("node already in heap");
        heap_.push_back({value, node});
        slot_[node] = heap_.size() - 1;
        sift_up(heap_.size() - 1);
    }

    /// Appends without restoring order; call heapify() once afterwards.
    void push_unordered(std::size_t node, double value) {
        if (contains(node)) throw std::logic_error("node already in heap");
        heap_.push_back({value, node});
        slot_[node] = heap_.size() - 1;
    }

    void heapify() {
        if (heap_.size() < 2) return;
        for (std::size_t i = heap_.size() / 2; i-- > 0;) sift_down(i);
    }

    void decrease(std::size_t node, double value) {
        const std::size_t s = slot_[node];
        assert(s != kAbsent);
        assert(!(heap_[s].value < value));
        heap_[s].value = value;
        sift_up(s);
    }

    Entry pop() {
        assert(!heap_.empty());
        const Entry out = heap_.front();
        slot_[out.node] = kAbsent;
        const Entry last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_.front() = last;
            slot_[last.node] = 0;
            sift_down(0);
        }
        return out;
    }

    /// Heap order and slot map consistency; used by tests.
    bool valid() const {
        std::size_t present = 0;
        for (std::size_t n = 0; n < slot_.size(); ++n) {
            if (slot_[n] == kAbsent) continue;
            ++present;
            if (slot_[n] >= heap_.size() || heap_[slot_[n]].node != n) return false;
        }
        if (present != heap_.size()) return false;
        for (std::size_t i = 1; i < heap_.size(); ++i) {
            if (before(heap_[i], heap_[(i - 1) / 2])) return false;
        }
        return true;
    }

private:
    static constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

    static bool before(const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.node < b.node;
    }

    void place(std::size_t i, const Entry& e) {
        heap_[i] = e;
        slot_[e.node] = i;
    }

    void sift_up(std::size_t i) {
        const Entry e = heap_[i];
        while (i > 0) {
            const std::size_t parent = (i - 1) / 2;
            if (!before(e, heap_[parent])) break;
            place(i, heap_[parent]);
            i = parent;
        }
        place(i, e);
    }

    void sift_down(std::size_t i) {
        const Entry e = heap_[i];
        const std::size_t n = heap_.size();
        while (true) {
            std::size_t child = 2 * i + 1;
            if (child >= n) break;
            if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
            if (!before(heap_[child], e)) break;
            place(i, heap_[child]);
            i = child;
        }
        place(i, e);
    }

    std::vector<Entry> heap_;
    std::vector<std::size_t> slot_;
};

}  // namespace hjb
