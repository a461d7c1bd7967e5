//! Every short cyclic chain with large enough mld must be covered by the classifier.

mod common;

use kltbasket::rational::q;

#[test]
fn complete_on_short_chains() {
    let all = common::chains(7, 7);
    for a in [q(1, 2), q(1, 3), q(1, 5)] {
        common::classifier_complete(&a, &all).unwrap();
    }
}
