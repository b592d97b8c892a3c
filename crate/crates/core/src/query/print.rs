use alloc::string::String;

use super::ast::QueryAst;

/// Renders the fully parenthesised canonical form of a query. Field and
/// theme values are always quoted.
pub fn print_query(ast: &QueryAst) -> String {
    let mut out = String::new();
    write_node(ast, &mut out);
    out
}

fn write_node(ast: &QueryAst, out: &mut String) {
    match ast {
        QueryAst::Term(t) => out.push_str(t),
        QueryAst::Phrase(tokens) => {
            out.push('"');
            for (i, t) in tokens.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(t);
            }
            out.push('"');
        }
        QueryAst::Field { name, value } => {
            out.push_str(name.as_str());
            out.push(':');
            write_quoted(value, out);
        }
        QueryAst::ThemeRef(path) => {
            out.push_str("theme:");
            write_quoted(path, out);
        }
        QueryAst::And(children) | QueryAst::Or(children) => {
            let op = if matches!(ast, QueryAst::And(_)) { " AND " } else { " OR " };
            out.push('(');
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(op);
                }
                write_node(c, out);
            }
            out.push(')');
        }
    }
}

fn write_quoted(value: &str, out: &mut String) {
    out.push('"');
    for c in value.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_query, FieldName};
    use alloc::string::ToString;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn term(t: &str) -> QueryAst {
        QueryAst::Term(t.to_string())
    }

    fn field(name: FieldName, value: &str) -> QueryAst {
        QueryAst::Field { name, value: value.into() }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(print_query(&QueryAst::And(vec![term("radar"), term("sonar")])), "(radar AND sonar)");
        assert_eq!(
            print_query(&QueryAst::Or(vec![
                field(FieldName::Unit, "Division A"),
                field(FieldName::Site, "B")
            ])),
            r#"(unit:"Division A" OR site:"B")"#
        );
        assert_eq!(print_query(&term("radar")), "radar");
        assert_eq!(
            print_query(&field(FieldName::Title, r#"say "hi" \ now"#)),
            r#"title:"say \"hi\" \\ now""#
        );
    }

    fn arb_leaf() -> impl Strategy<Value = QueryAst> {
        let token = "[a-z0-9]{1,8}";
        prop_oneof![
            token.prop_map(QueryAst::Term),
            proptest::collection::vec(token, 2..4).prop_map(QueryAst::Phrase),
            (0usize..8, "[ -~]{0,12}[a-zA-Z0-9][ -~]{0,4}")
                .prop_map(|(f, v)| QueryAst::Field { name: FieldName::ALL[f], value: v }),
            "[a-z_/ \"]{0,10}[a-z]".prop_map(QueryAst::ThemeRef),
        ]
    }

    /// ASTs of depth at most `depth`, built through the flattening
    /// constructors so they are always canonical.
    pub(crate) fn arb_ast(depth: u32) -> impl Strategy<Value = QueryAst> {
        arb_leaf().prop_recursive(depth.saturating_sub(1), 32, 4, |inner| {
            (any::<bool>(), proptest::collection::vec(inner, 2..4)).prop_map(|(conj, children)| {
                let children: Vec<QueryAst> = children;
                if conj {
                    QueryAst::and(children)
                } else {
                    QueryAst::or(children)
                }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn parse_inverts_print(ast in arb_ast(4)) {
            prop_assume!(ast.depth() <= 4);
            let printed = print_query(&ast);
            prop_assert_eq!(parse_query(&printed).unwrap(), ast);
        }
    }
}
