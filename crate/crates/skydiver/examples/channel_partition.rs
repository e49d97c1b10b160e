//! Partition a list of channel workloads across SPEs three ways: the
//! hardware's contiguous default, the serpentine + fine-tune heuristic,
//! and the exact branch-and-bound minimizer.

use skydiver::cbws::{
    cbws_partition, contiguous_partition, optimal_partition_oracle, partition_stats, Partition,
    WeightedItems,
};

fn show(label: &str, p: &Partition) {
    let s = partition_stats(p);
    println!(
        "{label:<11} sums {:?}  max {:.1}  balance {:.3}",
        s.sums, s.max_sum, s.balance
    );
}

fn main() -> skydiver::Result<()> {
    let items = WeightedItems::new(vec![8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0])?;
    let n = 2;

    show("contiguous", &contiguous_partition(&items, n)?);
    show("heuristic", &cbws_partition(&items, n, items.len())?);
    show("exact", &optimal_partition_oracle(&items, n)?);

    // A skewed case: one dominant channel has to sit alone.
    let items = WeightedItems::new(vec![9.0, 1.0, 1.0, 1.0, 1.0, 1.0])?;
    println!();
    show("contiguous", &contiguous_partition(&items, n)?);
    show("heuristic", &cbws_partition(&items, n, items.len())?);
    show("exact", &optimal_partition_oracle(&items, n)?);
    Ok(())
}
