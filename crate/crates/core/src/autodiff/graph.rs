use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::params::ParamStore;
use super::tensor::Tensor;
use crate::{Error, Result};

/// Handle to a node recorded in a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Input,
    Param(usize),
    Add(Var, Var),
    AddRow(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    MatMul(Var, Var),
    Transpose(Var),
    Concat { parts: Vec<Var>, axis: usize },
    GatherRows(Var, Vec<usize>),
    SliceCols { src: Var, start: usize },
    Scatter { src: Var, positions: Vec<usize> },
    Exp(Var),
    Log(Var),
    Tanh(Var),
    Sigmoid(Var),
    Relu(Var),
    SoftmaxRows(Var),
    LogSumExpRows { src: Var, mask: Vec<bool> },
    MaxRows { src: Var, argmax: Vec<Option<usize>> },
    Sum(Var),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
}

/// Gradients of a scalar loss, keyed by parameter name.
///
/// Every trainable parameter of the store is present; parameters the loss
/// does not depend on carry an all-zero tensor.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Gradients {
    grads: BTreeMap<String, Tensor>,
}

impl Gradients {
    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.grads.get(name)
    }

    pub fn insert(&mut self, name: String, grad: Tensor) {
        self.grads.insert(name, grad);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor)> {
        self.grads.iter()
    }

    pub fn len(&self) -> usize {
        self.grads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }

    /// Euclidean norm over all entries of the named gradients.
    pub fn norm_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> f64 {
        let mut sq = 0.0;
        for name in names {
            if let Some(g) = self.grads.get(name) {
                sq += g.data().iter().map(|v| v * v).sum::<f64>();
            }
        }
        libm::sqrt(sq)
    }
}

/// Tape of operations for one forward pass over a read-only [`ParamStore`].
pub struct Graph<'s> {
    store: &'s ParamStore,
    nodes: Vec<Node>,
    param_vars: BTreeMap<usize, Var>,
}

fn shape_err(op: &'static str, detail: String) -> Error {
    Error::Shape { op, detail }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

impl<'s> Graph<'s> {
    pub fn new(store: &'s ParamStore) -> Self {
        Graph { store, nodes: Vec::new(), param_vars: BTreeMap::new() }
    }

    pub fn store(&self) -> &'s ParamStore {
        self.store
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> [usize; 2] {
        self.nodes[v.0].value.shape()
    }

    fn push(&mut self, value: Tensor, op: Op, name: &'static str) -> Result<Var> {
        if !value.is_finite() {
            return Err(Error::NonFinite { op: name });
        }
        self.nodes.push(Node { value, op });
        Ok(Var(self.nodes.len() - 1))
    }

    /// A constant leaf; receives no gradient.
    pub fn input(&mut self, value: Tensor) -> Result<Var> {
        self.push(value, Op::Input, "input")
    }

    pub fn scalar(&mut self, value: f64) -> Result<Var> {
        self.input(Tensor::scalar(value))
    }

    /// Leaf bound to a named parameter. Repeated lookups share one node.
    pub fn param(&mut self, name: &str) -> Result<Var> {
        let idx = self
            .store
            .index_of(name)
            .ok_or_else(|| Error::UnknownParam(String::from(name)))?;
        if let Some(&v) = self.param_vars.get(&idx) {
            return Ok(v);
        }
        let value = self.store.entry(idx).value().clone();
        let v = self.push(value, Op::Param(idx), "param")?;
        self.param_vars.insert(idx, v);
        Ok(v)
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa != sb {
            return Err(shape_err(op, format!("{sa:?} vs {sb:?}")));
        }
        Ok(())
    }

    fn zip_map(&self, a: Var, b: Var, f: impl Fn(f64, f64) -> f64) -> Tensor {
        let (ta, tb) = (self.value(a), self.value(b));
        let data = ta.data().iter().zip(tb.data()).map(|(x, y)| f(*x, *y)).collect();
        Tensor::from_vec(ta.rows(), ta.cols(), data).expect("shape checked")
    }

    fn map(&self, a: Var, f: impl Fn(f64) -> f64) -> Tensor {
        let t = self.value(a);
        let data = t.data().iter().map(|x| f(*x)).collect();
        Tensor::from_vec(t.rows(), t.cols(), data).expect("same shape")
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let out = self.zip_map(a, b, |x, y| x + y);
        self.push(out, Op::Add(a, b), "add")
    }

    /// `a[m×n] + row[1×n]` broadcast over the rows of `a`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var> {
        let ([m, n], sr) = (self.shape(a), self.shape(row));
        if sr != [1, n] {
            return Err(shape_err("add_row", format!("{:?} + {sr:?}", [m, n])));
        }
        let mut out = self.value(a).clone();
        let r = self.value(row).data().to_vec();
        for i in 0..m {
            for (o, b) in out.data_mut()[i * n..(i + 1) * n].iter_mut().zip(&r) {
                *o += *b;
            }
        }
        self.push(out, Op::AddRow(a, row), "add_row")
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("sub", a, b)?;
        let out = self.zip_map(a, b, |x, y| x - y);
        self.push(out, Op::Sub(a, b), "sub")
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let out = self.zip_map(a, b, |x, y| x * y);
        self.push(out, Op::Mul(a, b), "mul")
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let out = self.map(a, |x| c * x);
        self.push(out, Op::Scale(a, c), "scale")
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa[1] != sb[0] {
            return Err(shape_err("matmul", format!("{sa:?} x {sb:?}")));
        }
        let out = self.value(a).matmul(self.value(b));
        self.push(out, Op::MatMul(a, b), "matmul")
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).transpose();
        self.push(out, Op::Transpose(a), "transpose")
    }

    /// Concatenates along columns (`axis == 1`) or rows (`axis == 0`).
    pub fn concat(&mut self, parts: &[Var], axis: usize) -> Result<Var> {
        if parts.is_empty() || axis > 1 {
            return Err(shape_err("concat", format!("{} parts on axis {axis}", parts.len())));
        }
        let shapes: Vec<[usize; 2]> = parts.iter().map(|p| self.shape(*p)).collect();
        let keep = 1 - axis;
        if shapes.iter().any(|s| s[keep] != shapes[0][keep]) {
            return Err(shape_err("concat", format!("{shapes:?} on axis {axis}")));
        }
        let out = if axis == 0 {
            let rows = shapes.iter().map(|s| s[0]).sum();
            let mut data = Vec::with_capacity(rows * shapes[0][1]);
            for p in parts {
                data.extend_from_slice(self.value(*p).data());
            }
            Tensor::from_vec(rows, shapes[0][1], data)?
        } else {
            let rows = shapes[0][0];
            let cols: usize = shapes.iter().map(|s| s[1]).sum();
            let mut data = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for p in parts {
                    data.extend_from_slice(self.value(*p).row_slice(r));
                }
            }
            Tensor::from_vec(rows, cols, data)?
        };
        self.push(out, Op::Concat { parts: parts.to_vec(), axis }, "concat")
    }

    /// Selects rows by index (embedding lookup when `a` is a table).
    pub fn gather_rows(&mut self, a: Var, index: &[usize]) -> Result<Var> {
        let [m, n] = self.shape(a);
        if let Some(bad) = index.iter().find(|&&i| i >= m) {
            return Err(shape_err("gather_rows", format!("row {bad} of {m}")));
        }
        let src = self.value(a);
        let mut data = Vec::with_capacity(index.len() * n);
        for &i in index {
            data.extend_from_slice(src.row_slice(i));
        }
        let out = Tensor::from_vec(index.len(), n, data)?;
        self.push(out, Op::GatherRows(a, index.to_vec()), "gather_rows")
    }

    /// Columns `start..start + len`.
    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Result<Var> {
        let [m, n] = self.shape(a);
        if start + len > n {
            return Err(shape_err("slice_cols", format!("{start}..{} of {n}", start + len)));
        }
        let src = self.value(a);
        let mut data = Vec::with_capacity(m * len);
        for r in 0..m {
            data.extend_from_slice(&src.row_slice(r)[start..start + len]);
        }
        let out = Tensor::from_vec(m, len, data)?;
        self.push(out, Op::SliceCols { src: a, start }, "slice_cols")
    }

    /// Writes the elements of `a` (flattened) into a zero matrix of the given
    /// shape at the given flat positions. Positions must be distinct.
    pub fn scatter(&mut self, a: Var, positions: &[usize], rows: usize, cols: usize) -> Result<Var> {
        let n = self.value(a).len();
        if positions.len() != n || positions.iter().any(|&p| p >= rows * cols) {
            return Err(shape_err(
                "scatter",
                format!("{n} values, {} positions into {rows}x{cols}", positions.len()),
            ));
        }
        let mut out = Tensor::zeros(rows, cols);
        for (v, &p) in self.value(a).data().iter().zip(positions) {
            out.data_mut()[p] = *v;
        }
        self.push(out, Op::Scatter { src: a, positions: positions.to_vec() }, "scatter")
    }

    pub fn exp(&mut self, a: Var) -> Result<Var> {
        let out = self.map(a, libm::exp);
        self.push(out, Op::Exp(a), "exp")
    }

    pub fn log(&mut self, a: Var) -> Result<Var> {
        let out = self.map(a, libm::log);
        self.push(out, Op::Log(a), "log")
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        let out = self.map(a, libm::tanh);
        self.push(out, Op::Tanh(a), "tanh")
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        let out = self.map(a, sigmoid);
        self.push(out, Op::Sigmoid(a), "sigmoid")
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        let out = self.map(a, |x| if x > 0.0 { x } else { 0.0 });
        self.push(out, Op::Relu(a), "relu")
    }

    fn check_mask(&self, op: &'static str, a: Var, mask: &[bool]) -> Result<()> {
        let n = self.value(a).len();
        if mask.len() != n {
            return Err(shape_err(op, format!("mask of {} for {n} values", mask.len())));
        }
        Ok(())
    }

    /// Softmax along each row. Masked-out entries (`false`) get probability
    /// zero; a row with no admissible entry is all zeros.
    pub fn softmax_rows(&mut self, a: Var, mask: Option<&[bool]>) -> Result<Var> {
        if let Some(m) = mask {
            self.check_mask("softmax_rows", a, m)?;
        }
        let src = self.value(a);
        let [rows, cols] = src.shape();
        let mut out = Tensor::zeros(rows, cols);
        for r in 0..rows {
            let allowed = |c: usize| mask.map_or(true, |m| m[r * cols + c]);
            let row = src.row_slice(r);
            let max = (0..cols)
                .filter(|&c| allowed(c))
                .map(|c| row[c])
                .fold(f64::NEG_INFINITY, f64::max);
            if max == f64::NEG_INFINITY {
                continue;
            }
            let mut total = 0.0;
            for c in (0..cols).filter(|&c| allowed(c)) {
                let e = libm::exp(row[c] - max);
                out.data_mut()[r * cols + c] = e;
                total += e;
            }
            for c in 0..cols {
                out.data_mut()[r * cols + c] /= total;
            }
        }
        self.push(out, Op::SoftmaxRows(a), "softmax_rows")
    }

    /// `log Σ exp` over the admissible entries of each row, as an `m×1`
    /// column. Every row needs at least one admissible entry.
    pub fn logsumexp_rows(&mut self, a: Var, mask: &[bool]) -> Result<Var> {
        self.check_mask("logsumexp_rows", a, mask)?;
        let src = self.value(a);
        let [rows, cols] = src.shape();
        let mut out = Tensor::zeros(rows, 1);
        for r in 0..rows {
            let row = src.row_slice(r);
            let admissible = || (0..cols).filter(move |&c| mask[r * cols + c]);
            let max = admissible().map(|c| row[c]).fold(f64::NEG_INFINITY, f64::max);
            if max == f64::NEG_INFINITY {
                return Err(shape_err("logsumexp_rows", format!("row {r} has no admissible entry")));
            }
            let total: f64 = admissible().map(|c| libm::exp(row[c] - max)).sum();
            out.data_mut()[r] = max + libm::log(total);
        }
        let op = Op::LogSumExpRows { src: a, mask: mask.to_vec() };
        self.push(out, op, "logsumexp_rows")
    }

    /// Row-wise maximum over admissible entries with its column index.
    ///
    /// The first maximal column wins ties. Rows without an admissible entry
    /// yield value 0 and `None`. In the backward pass the whole gradient of a
    /// row goes to its argmax element.
    pub fn max_rows(&mut self, a: Var, mask: Option<&[bool]>) -> Result<(Var, Vec<Option<usize>>)> {
        if let Some(m) = mask {
            self.check_mask("max_rows", a, m)?;
        }
        let src = self.value(a);
        let [rows, cols] = src.shape();
        let mut out = Tensor::zeros(rows, 1);
        let mut argmax = vec![None; rows];
        for r in 0..rows {
            let row = src.row_slice(r);
            let mut best: Option<usize> = None;
            for c in 0..cols {
                if mask.map_or(true, |m| m[r * cols + c]) && best.map_or(true, |b| row[c] > row[b]) {
                    best = Some(c);
                }
            }
            if let Some(b) = best {
                out.data_mut()[r] = row[b];
            }
            argmax[r] = best;
        }
        let v = self.push(out, Op::MaxRows { src: a, argmax: argmax.clone() }, "max_rows")?;
        Ok((v, argmax))
    }

    /// Sum of all elements, as a 1x1 tensor.
    pub fn sum(&mut self, a: Var) -> Result<Var> {
        let total: f64 = self.value(a).data().iter().sum();
        self.push(Tensor::scalar(total), Op::Sum(a), "sum")
    }

    /// `relu(x·W1 + b1)·W2 + b2` using parameters `{prefix}.w1` etc.
    pub fn ffn(&mut self, prefix: &str, x: Var) -> Result<Var> {
        let w1 = self.param(&format!("{prefix}.w1"))?;
        let b1 = self.param(&format!("{prefix}.b1"))?;
        let w2 = self.param(&format!("{prefix}.w2"))?;
        let b2 = self.param(&format!("{prefix}.b2"))?;
        let h = self.matmul(x, w1)?;
        let h = self.add_row(h, b1)?;
        let h = self.relu(h)?;
        let y = self.matmul(h, w2)?;
        self.add_row(y, b2)
    }

    /// Reverse pass from a 1x1 `loss`.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        let [r, c] = self.shape(loss);
        if (r, c) != (1, 1) {
            return Err(Error::NotScalar { rows: r, cols: c });
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(1.0));
        let mut param_grads: BTreeMap<usize, Tensor> = BTreeMap::new();

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Input => {}
                Op::Param(p) => {
                    param_grads.insert(*p, g);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, &g, &self.nodes);
                    accumulate_owned(&mut grads, *b, g, &self.nodes);
                }
                Op::AddRow(a, row) => {
                    let n = g.cols();
                    let mut gr = Tensor::zeros(1, n);
                    for i in 0..g.rows() {
                        for (o, v) in gr.data_mut().iter_mut().zip(g.row_slice(i)) {
                            *o += *v;
                        }
                    }
                    accumulate_owned(&mut grads, *row, gr, &self.nodes);
                    accumulate_owned(&mut grads, *a, g, &self.nodes);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, &g, &self.nodes);
                    let neg = scaled(&g, -1.0);
                    accumulate_owned(&mut grads, *b, neg, &self.nodes);
                }
                Op::Mul(a, b) => {
                    let ga = hadamard(&g, self.value(*b));
                    let gb = hadamard(&g, self.value(*a));
                    accumulate_owned(&mut grads, *a, ga, &self.nodes);
                    accumulate_owned(&mut grads, *b, gb, &self.nodes);
                }
                Op::Scale(a, c) => {
                    accumulate_owned(&mut grads, *a, scaled(&g, *c), &self.nodes);
                }
                Op::MatMul(a, b) => {
                    if wants_grad(&self.nodes, *a) {
                        let ga = g.matmul_bt(self.value(*b));
                        accumulate_owned(&mut grads, *a, ga, &self.nodes);
                    }
                    if wants_grad(&self.nodes, *b) {
                        let gb = self.value(*a).matmul_at(&g);
                        accumulate_owned(&mut grads, *b, gb, &self.nodes);
                    }
                }
                Op::Transpose(a) => {
                    accumulate_owned(&mut grads, *a, g.transpose(), &self.nodes);
                }
                Op::Concat { parts, axis } => {
                    let mut offset = 0;
                    for p in parts {
                        let [pr, pc] = self.shape(*p);
                        let mut gp = Tensor::zeros(pr, pc);
                        if *axis == 0 {
                            gp.data_mut()
                                .copy_from_slice(&g.data()[offset * pc..(offset + pr) * pc]);
                            offset += pr;
                        } else {
                            for r in 0..pr {
                                gp.data_mut()[r * pc..(r + 1) * pc]
                                    .copy_from_slice(&g.row_slice(r)[offset..offset + pc]);
                            }
                            offset += pc;
                        }
                        accumulate_owned(&mut grads, *p, gp, &self.nodes);
                    }
                }
                Op::GatherRows(a, index) => {
                    if wants_grad(&self.nodes, *a) {
                        let [m, n] = self.shape(*a);
                        let mut ga = Tensor::zeros(m, n);
                        for (r, &i) in index.iter().enumerate() {
                            for (o, v) in ga.data_mut()[i * n..(i + 1) * n].iter_mut().zip(g.row_slice(r)) {
                                *o += *v;
                            }
                        }
                        accumulate_owned(&mut grads, *a, ga, &self.nodes);
                    }
                }
                Op::SliceCols { src, start } => {
                    let [m, n] = self.shape(*src);
                    let len = g.cols();
                    let mut ga = Tensor::zeros(m, n);
                    for r in 0..m {
                        ga.data_mut()[r * n + start..r * n + start + len].copy_from_slice(g.row_slice(r));
                    }
                    accumulate_owned(&mut grads, *src, ga, &self.nodes);
                }
                Op::Scatter { src, positions } => {
                    let [m, n] = self.shape(*src);
                    let data = positions.iter().map(|&p| g.data()[p]).collect();
                    accumulate_owned(&mut grads, *src, Tensor::from_vec(m, n, data)?, &self.nodes);
                }
                Op::Exp(a) => {
                    let ga = hadamard(&g, &node.value);
                    accumulate_owned(&mut grads, *a, ga, &self.nodes);
                }
                Op::Log(a) => {
                    let ga = zip_with(&g, self.value(*a), |d, x| d / x);
                    accumulate_owned(&mut grads, *a, ga, &self.nodes);
                }
                Op::Tanh(a) => {
                    let ga = zip_with(&g, &node.value, |d, y| d * (1.0 - y * y));
                    accumulate_owned(&mut grads, *a, ga, &self.nodes);
                }
                Op::Sigmoid(a) => {
                    let ga = zip_with(&g, &node.value, |d, y| d * y * (1.0 - y));
                    accumulate_owned(&mut grads, *a, ga, &self.nodes);
                }
                Op::Relu(a) => {
                    let ga = zip_with(&g, self.value(*a), |d, x| if x > 0.0 { d } else { 0.0 });
                    accumulate_owned(&mut grads, *a, ga, &self.nodes);
                }
                Op::SoftmaxRows(src) => {
                    let y = &node.value;
                    let [m, n] = y.shape();
                    let mut ga = Tensor::zeros(m, n);
                    for r in 0..m {
                        let (yr, gr) = (y.row_slice(r), g.row_slice(r));
                        let dot: f64 = yr.iter().zip(gr).map(|(a, b)| a * b).sum();
                        for c in 0..n {
                            ga.data_mut()[r * n + c] = yr[c] * (gr[c] - dot);
                        }
                    }
                    accumulate_owned(&mut grads, *src, ga, &self.nodes);
                }
                Op::LogSumExpRows { src, mask } => {
                    let x = self.value(*src);
                    let [m, n] = x.shape();
                    let mut ga = Tensor::zeros(m, n);
                    for r in 0..m {
                        let row = x.row_slice(r);
                        let lse = node.value.data()[r];
                        for c in 0..n {
                            if mask[r * n + c] {
                                ga.data_mut()[r * n + c] = g.data()[r] * libm::exp(row[c] - lse);
                            }
                        }
                    }
                    accumulate_owned(&mut grads, *src, ga, &self.nodes);
                }
                Op::MaxRows { src, argmax } => {
                    let [m, n] = self.shape(*src);
                    let mut ga = Tensor::zeros(m, n);
                    for (r, best) in argmax.iter().enumerate() {
                        if let Some(c) = best {
                            ga.data_mut()[r * n + c] = g.data()[r];
                        }
                    }
                    accumulate_owned(&mut grads, *src, ga, &self.nodes);
                }
                Op::Sum(a) => {
                    let [m, n] = self.shape(*a);
                    accumulate_owned(&mut grads, *a, Tensor::filled(m, n, g.item()), &self.nodes);
                }
            }
        }

        let mut out = Gradients::default();
        for (idx, entry) in self.store.entries().iter().enumerate() {
            if !entry.trainable() {
                continue;
            }
            let [m, n] = entry.value().shape();
            let g = param_grads.remove(&idx).unwrap_or_else(|| Tensor::zeros(m, n));
            out.insert(String::from(entry.name()), g);
        }
        Ok(out)
    }
}

fn wants_grad(nodes: &[Node], v: Var) -> bool {
    !matches!(nodes[v.0].op, Op::Input)
}

fn accumulate(grads: &mut [Option<Tensor>], v: Var, g: &Tensor, nodes: &[Node]) {
    if !wants_grad(nodes, v) {
        return;
    }
    match &mut grads[v.0] {
        Some(existing) => existing.add_assign(g),
        slot => *slot = Some(g.clone()),
    }
}

fn accumulate_owned(grads: &mut [Option<Tensor>], v: Var, g: Tensor, nodes: &[Node]) {
    if !wants_grad(nodes, v) {
        return;
    }
    match &mut grads[v.0] {
        Some(existing) => existing.add_assign(&g),
        slot => *slot = Some(g),
    }
}

fn zip_with(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| f(*x, *y)).collect();
    Tensor::from_vec(a.rows(), a.cols(), data).expect("same shape")
}

fn hadamard(a: &Tensor, b: &Tensor) -> Tensor {
    zip_with(a, b, |x, y| x * y)
}

fn scaled(a: &Tensor, c: f64) -> Tensor {
    let data = a.data().iter().map(|x| c * x).collect();
    Tensor::from_vec(a.rows(), a.cols(), data).expect("same shape")
}
