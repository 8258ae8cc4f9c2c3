use crate::syntax::{CtorName, Expr};

/// Candidate attempts are capped to keep pathological cases bounded.
const MAX_ATTEMPTS: usize = 5_000;

/// Greedy structural shrinking: repeatedly takes the first strictly smaller
/// candidate that still fails, without introducing new free variables.
pub fn shrink(e: &Expr, failing: impl Fn(&Expr) -> bool) -> Expr {
    let mut cur = e.clone();
    let mut attempts = 0;
    'outer: loop {
        let free = cur.free_vars();
        for cand in candidates(&cur) {
            attempts += 1;
            if attempts > MAX_ATTEMPTS {
                break 'outer;
            }
            if cand.size() < cur.size() && cand.free_vars().is_subset(&free) && failing(&cand) {
                cur = cand;
                continue 'outer;
            }
        }
        break;
    }
    cur
}

fn candidates(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    let nullary: Vec<CtorName> = e.ctors().into_iter().filter(|c| c.arity() == 0).collect();
    for path in positions(e) {
        let node = get_at(e, &path);
        let mut replacements: Vec<Expr> = children(node).into_iter().cloned().collect();
        if let Expr::Match(s, arms) = node {
            for i in 0..arms.len() {
                let mut fewer = arms.clone();
                fewer.remove(i);
                replacements.push(Expr::Match(s.clone(), fewer));
            }
        }
        if let Expr::App(f, a) = node {
            if let Expr::Rec { body, .. } = &**f {
                replacements.push(Expr::app(Expr::Int(0), (**a).clone()));
                replacements.push((**body).clone());
            }
        }
        if !matches!(node, Expr::Int(0)) {
            replacements.push(Expr::Int(0));
        }
        for c in &nullary {
            replacements.push(Expr::Ctor(c.clone(), vec![]));
        }
        for r in replacements {
            out.push(replace_at(e, &path, r));
        }
    }
    out
}

fn children(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Int(_) | Expr::Var(_) | Expr::Err => vec![],
        Expr::Ctor(_, args) => args.iter().collect(),
        Expr::App(f, a) => vec![f, a],
        Expr::Match(s, arms) => std::iter::once(&**s).chain(arms.iter().map(|a| &a.body)).collect(),
        Expr::Rec { body, .. } => vec![body],
    }
}

fn positions(e: &Expr) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for (i, c) in children(e).into_iter().enumerate() {
        for mut p in positions(c) {
            p.insert(0, i);
            out.push(p);
        }
    }
    out
}

fn get_at<'a>(e: &'a Expr, path: &[usize]) -> &'a Expr {
    match path.split_first() {
        None => e,
        Some((&i, rest)) => get_at(children(e)[i], rest),
    }
}

fn replace_at(e: &Expr, path: &[usize], new: Expr) -> Expr {
    let Some((&i, rest)) = path.split_first() else {
        return new;
    };
    match e {
        Expr::Ctor(c, args) => {
            let mut args = args.clone();
            args[i] = replace_at(&args[i], rest, new);
            Expr::Ctor(c.clone(), args)
        }
        Expr::App(f, a) => {
            if i == 0 {
                Expr::app(replace_at(f, rest, new), (**a).clone())
            } else {
                Expr::app((**f).clone(), replace_at(a, rest, new))
            }
        }
        Expr::Match(s, arms) => {
            if i == 0 {
                Expr::Match(Box::new(replace_at(s, rest, new)), arms.clone())
            } else {
                let mut arms = arms.clone();
                arms[i - 1].body = replace_at(&arms[i - 1].body, rest, new);
                Expr::Match(s.clone(), arms)
            }
        }
        Expr::Rec { fun, param, body } => Expr::Rec {
            fun: fun.clone(),
            param: param.clone(),
            body: Box::new(replace_at(body, rest, new)),
        },
        Expr::Int(_) | Expr::Var(_) | Expr::Err => unreachable!("leaf has no children"),
    }
}
