//! Tree edit distance between small syntax trees and the derived similarity.

use sepvote::codesim::{code_similarity_matrix, parse_tree, tree_edit_distance, EditCosts, SimilarityCap};
use sepvote::diversity::Ranking;

fn main() {
    let sources = [
        (
            "loop_sum",
            "fn(params(xs) block(for(x xs assign(acc add(acc x))) ret(acc)))",
        ),
        (
            "loop_sum_renamed",
            "fn(params(ys) block(for(y ys assign(acc add(acc y))) ret(acc)))",
        ),
        ("fold_sum", "fn(params(xs) block(ret(call(fold xs 0 add))))"),
        (
            "loop_sum_copy",
            "fn(params(xs) block(for(x xs assign(acc add(acc x))) ret(acc)))",
        ),
    ];
    let trees: Vec<_> = sources
        .iter()
        .map(|(id, text)| (id.to_string(), parse_tree(text).expect("well-formed tree")))
        .collect();

    let unit = EditCosts::default();
    println!(
        "d(loop_sum, fold_sum) = {}",
        tree_edit_distance(&trees[0].1, &trees[2].1, &unit)
    );
    let cheap_relabel = EditCosts { relabel: 0.5, ..unit };
    println!(
        "d(loop_sum, loop_sum_renamed) with relabel cost 0.5 = {}",
        tree_edit_distance(&trees[0].1, &trees[1].1, &cheap_relabel)
    );

    let cmp = code_similarity_matrix(&trees, &Ranking::by_id(), &unit, SimilarityCap::Auto);
    print!("\n{}\n{}", cmp.distance_csv(), cmp.similarity.to_csv());
    println!("identical pairs take the cap {}", cmp.cap);
}
