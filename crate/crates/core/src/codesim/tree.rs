use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tree parse error at byte {offset}: {message}")]
pub struct TreeParseError {
    pub offset: usize,
    pub message: String,
}

fn err(offset: usize, message: &str) -> TreeParseError {
    TreeParseError {
        offset,
        message: message.to_string(),
    }
}

/// Ordered labeled tree stored in postorder. The root, when present, is the
/// last node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AstTree {
    labels: Vec<String>,
    parents: Vec<Option<usize>>,
    /// Children of each node in left-to-right order.
    children: Vec<Vec<usize>>,
}

impl AstTree {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn leaf(label: &str) -> Self {
        AstTree {
            labels: vec![label.to_string()],
            parents: vec![None],
            children: vec![Vec::new()],
        }
    }

    /// Builds a tree from a root label and its subtrees, left to right.
    pub fn node(label: &str, subtrees: Vec<AstTree>) -> Self {
        let mut tree = AstTree::empty();
        let mut roots = Vec::new();
        for sub in subtrees.into_iter().filter(|s| !s.is_empty()) {
            let offset = tree.labels.len();
            for i in 0..sub.len() {
                tree.labels.push(sub.labels[i].clone());
                tree.parents.push(sub.parents[i].map(|p| p + offset));
                tree.children
                    .push(sub.children[i].iter().map(|c| c + offset).collect());
            }
            roots.push(offset + sub.len() - 1);
        }
        let root = tree.labels.len();
        for &r in &roots {
            tree.parents[r] = Some(root);
        }
        tree.labels.push(label.to_string());
        tree.parents.push(None);
        tree.children.push(roots);
        tree
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.labels.len().checked_sub(1)
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parents[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// Postorder index of each node's leftmost leaf descendant.
    pub fn leftmost_leaves(&self) -> Vec<usize> {
        let mut lml = vec![0; self.len()];
        for i in 0..self.len() {
            lml[i] = match self.children[i].first() {
                Some(&c) => lml[c],
                None => i,
            };
        }
        lml
    }

    /// Same shape with every label passed through `f`.
    pub fn map_labels(&self, f: impl Fn(&str) -> String) -> AstTree {
        AstTree {
            labels: self.labels.iter().map(|l| f(l)).collect(),
            ..self.clone()
        }
    }

    fn from_arena(arena: Vec<(String, Vec<usize>)>, root: usize) -> AstTree {
        // iterative postorder over the arena
        let mut order = Vec::with_capacity(arena.len());
        let mut stack = vec![(root, 0usize)];
        while let Some((node, next)) = stack.pop() {
            if next < arena[node].1.len() {
                stack.push((node, next + 1));
                stack.push((arena[node].1[next], 0));
            } else {
                order.push(node);
            }
        }
        let mut position = vec![0; arena.len()];
        for (pos, &node) in order.iter().enumerate() {
            position[node] = pos;
        }
        let mut tree = AstTree {
            labels: Vec::with_capacity(order.len()),
            parents: vec![None; order.len()],
            children: Vec::with_capacity(order.len()),
        };
        for &node in &order {
            let kids: Vec<usize> = arena[node].1.iter().map(|&c| position[c]).collect();
            for &k in &kids {
                tree.parents[k] = Some(position[node]);
            }
            tree.labels.push(arena[node].0.clone());
            tree.children.push(kids);
        }
        tree
    }
}

fn is_label_byte(b: u8) -> bool {
    !(b.is_ascii_whitespace() || b == b'(' || b == b')')
}

/// Parses `label(child child ...)` notation. A child list must follow its
/// label with no space in between. Whitespace-only input is the empty tree.
pub fn parse_tree(text: &str) -> Result<AstTree, TreeParseError> {
    let bytes = text.as_bytes();
    let mut arena: Vec<(String, Vec<usize>)> = Vec::new();
    let mut open: Vec<(usize, usize)> = Vec::new(); // (node, offset of '(')
    let mut root: Option<usize> = None;
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        if b.is_ascii_whitespace() {
            pos += 1;
        } else if b == b')' {
            if open.pop().is_none() {
                return Err(err(pos, "unbalanced `)`"));
            }
            pos += 1;
        } else if b == b'(' {
            return Err(err(pos, "empty label before `(`"));
        } else {
            let start = pos;
            while pos < bytes.len() && is_label_byte(bytes[pos]) {
                pos += 1;
            }
            let node = arena.len();
            arena.push((text[start..pos].to_string(), Vec::new()));
            match open.last() {
                Some(&(parent, _)) => arena[parent].1.push(node),
                None if root.is_none() => root = Some(node),
                None => return Err(err(start, "more than one root")),
            }
            if pos < bytes.len() && bytes[pos] == b'(' {
                open.push((node, pos));
                pos += 1;
            }
        }
    }
    if !open.is_empty() {
        return Err(err(bytes.len(), "unclosed `(` at end of input"));
    }
    Ok(match root {
        Some(r) => AstTree::from_arena(arena, r),
        None => AstTree::empty(),
    })
}

impl fmt::Display for AstTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(t: &AstTree, n: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str(t.label(n))?;
            let kids = t.children(n);
            if !kids.is_empty() {
                f.write_str("(")?;
                for (i, &c) in kids.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write_node(t, c, f)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
        match self.root() {
            Some(r) => write_node(self, r, f),
            None => Ok(()),
        }
    }
}
