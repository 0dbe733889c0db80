//! Plain-text drawing of a dendrogram.

use crate::hierarchy::{Dendrogram, NodeRef};
use crate::io::{format_number, Precision};
use crate::scalar::Scalar;

/// Draws the canonical orientation of `tree` top down, one node per line.
/// Internal nodes show their rank and height, terminals their index and
/// label. Two terminals give three lines.
pub fn render_dendrogram<T: Scalar>(tree: &Dendrogram<T>) -> String {
    let tree = tree.canonicalize();
    let mut out = String::new();
    draw(&tree, tree.root(), "", "", &mut out);
    out
}

fn draw<T: Scalar>(tree: &Dendrogram<T>, node: NodeRef, head: &str, tail: &str, out: &mut String) {
    out.push_str(head);
    match tree.children(node) {
        None => {
            let NodeRef::Terminal(i) = node else { unreachable!() };
            out.push_str(&format!("{node} {}\n", tree.labels()[i]));
        }
        Some((l, r)) => {
            let h = format_number(tree.height(node).as_f64(), Precision::Short);
            out.push_str(&format!("{node} h={h}\n"));
            draw(tree, l, &format!("{tail}├── "), &format!("{tail}│   "), out);
            draw(tree, r, &format!("{tail}└── "), &format!("{tail}    "), out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::Merge;

    #[test]
    fn two_terminals_three_lines() {
        let tree = Dendrogram::new(
            vec!["a".into(), "b".into()],
            vec![Merge { rank: 1, left: NodeRef::Terminal(1), right: NodeRef::Terminal(0), height: 0.5 }],
        )
        .unwrap();
        let text = render_dendrogram(&tree);
        assert_eq!(text, "q1 h=0.5000000\n├── t1 a\n└── t2 b\n");
        assert_eq!(render_dendrogram(&tree.canonicalize()), text);
    }

    #[test]
    fn nested() {
        let tree = Dendrogram::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                Merge { rank: 1, left: NodeRef::Terminal(1), right: NodeRef::Terminal(2), height: 1.0 },
                Merge { rank: 2, left: NodeRef::Terminal(0), right: NodeRef::Internal(1), height: 2.0 },
            ],
        )
        .unwrap();
        let text = render_dendrogram(&tree);
        assert_eq!(text.lines().count(), 5);
        assert!(text.contains("│   ├── t2 b") || text.contains("    ├── t2 b"), "{text}");
    }
}
