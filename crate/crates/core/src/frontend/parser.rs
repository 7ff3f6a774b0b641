//! Recursive-descent parser for data and model files.

use std::sync::Arc;

use crate::ir::{
    AccessStep, ArrayDims, BinOp, ConstraintZone, Constant, Domain, EnumType, Expr, ExprKind,
    Feature, Literal, Loc, Record, Span, Statement, TypeRef, UnOp, Variable, ZoneOrigin,
};

use super::lexer::{tokenize, Tok, Token};
use super::{ClassDecl, DataAst, DataDecl, ModelAst, ModelItem, ParseError};

pub fn parse_data(text: &str) -> Result<DataAst, ParseError> {
    parse_data_file("<data>", text)
}

pub fn parse_model(text: &str) -> Result<ModelAst, ParseError> {
    parse_model_file("<model>", text)
}

pub fn parse_data_file(file: &str, text: &str) -> Result<DataAst, ParseError> {
    let mut p = Parser::new(file, text)?;
    let model_name = p.model_header()?;
    let mut decls = Vec::new();
    loop {
        if p.check_kw("enum") {
            decls.push(DataDecl::Enum(p.enum_decl()?));
        } else if p.check_kw("int") || p.check_kw("real") || p.check_kw("bool") {
            decls.push(DataDecl::Const(p.const_decl()?));
        } else {
            p.expect_eof()?;
            return Ok(DataAst { model_name, decls });
        }
    }
}

pub fn parse_model_file(file: &str, text: &str) -> Result<ModelAst, ParseError> {
    let mut p = Parser::new(file, text)?;
    let model_name = p.model_header()?;
    let mut items = Vec::new();
    loop {
        if p.check_kw("main") || p.check_kw("abstract") || p.check_kw("class") {
            items.push(ModelItem::Class(p.class_decl()?));
        } else if p.at_feature_start() {
            items.push(ModelItem::Feature(p.feature()?));
        } else {
            p.expect_eof()?;
            return Ok(ModelAst { model_name, items });
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    expected: Vec<String>,
}

impl Parser {
    fn new(file: &str, text: &str) -> Result<Self, ParseError> {
        let file: Arc<str> = Arc::from(file);
        Ok(Parser { tokens: tokenize(&file, text)?, pos: 0, expected: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn loc(&self) -> Loc {
        self.tokens[self.pos].loc.clone()
    }

    fn span(&self) -> Span {
        Span::at(self.loc())
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        self.expected.clear();
        tok
    }

    fn note(&mut self, what: String) {
        if !self.expected.contains(&what) {
            self.expected.push(what);
        }
    }

    fn check_kw(&mut self, kw: &'static str) -> bool {
        self.note(format!("`{kw}`"));
        *self.peek() == Tok::Keyword(kw)
    }

    fn check_punct(&mut self, p: &'static str) -> bool {
        self.note(format!("`{p}`"));
        *self.peek() == Tok::Punct(p)
    }

    fn eat_kw(&mut self, kw: &'static str) -> bool {
        let hit = self.check_kw(kw);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_punct(&mut self, p: &'static str) -> bool {
        let hit = self.check_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn error(&self) -> ParseError {
        ParseError {
            loc: self.loc(),
            found: self.peek().to_string(),
            expected: self.expected.clone(),
        }
    }

    fn expect_kw(&mut self, kw: &'static str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.note("identifier".into());
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error()),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.note("end of input".into());
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn model_header(&mut self) -> Result<Option<String>, ParseError> {
        if self.eat_kw("model") {
            let name = self.ident()?;
            self.expect_punct(";")?;
            Ok(Some(name))
        } else {
            Ok(None)
        }
    }

    fn enum_decl(&mut self) -> Result<EnumType, ParseError> {
        let span = self.span();
        self.expect_kw("enum")?;
        let name = self.ident()?;
        self.expect_punct(":=")?;
        self.expect_punct("{")?;
        let mut literals = vec![self.ident()?];
        while self.eat_punct(",") {
            literals.push(self.ident()?);
        }
        self.expect_punct("}")?;
        self.expect_punct(";")?;
        Ok(EnumType { name, literals, span })
    }

    fn const_decl(&mut self) -> Result<Constant, ParseError> {
        let span = self.span();
        let ty = self.type_ref()?;
        let name = self.ident()?;
        self.expect_punct(":=")?;
        let value = self.literal()?;
        self.expect_punct(";")?;
        Ok(Constant { name, ty, value, span })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let negative = self.eat_punct("-");
        self.note("literal".into());
        let lit = match self.peek().clone() {
            Tok::Int(v) => Literal::Int(if negative { -v } else { v }),
            Tok::Real(v) => Literal::Real(if negative { -v } else { v }),
            Tok::Keyword("true") if !negative => Literal::Bool(true),
            Tok::Keyword("false") if !negative => Literal::Bool(false),
            _ => return Err(self.error()),
        };
        self.bump();
        Ok(lit)
    }

    fn type_ref(&mut self) -> Result<TypeRef, ParseError> {
        if self.eat_kw("int") {
            Ok(TypeRef::Int)
        } else if self.eat_kw("real") {
            Ok(TypeRef::Real)
        } else if self.eat_kw("bool") {
            Ok(TypeRef::Bool)
        } else {
            Ok(TypeRef::Named(self.ident()?))
        }
    }

    fn class_decl(&mut self) -> Result<ClassDecl, ParseError> {
        let span = self.span();
        let is_main = self.eat_kw("main");
        let is_abstract = self.eat_kw("abstract");
        self.expect_kw("class")?;
        let name = self.ident()?;
        let mut super_types = Vec::new();
        if self.eat_kw("extends") {
            super_types.push(self.ident()?);
            while self.eat_punct(",") {
                super_types.push(self.ident()?);
            }
        }
        let features = self.feature_block()?;
        Ok(ClassDecl { is_main, is_abstract, name, super_types, features, span })
    }

    fn feature_block(&mut self) -> Result<Vec<Feature>, ParseError> {
        self.expect_punct("{")?;
        let mut features = Vec::new();
        while !self.eat_punct("}") {
            if !self.at_feature_start() {
                return Err(self.error());
            }
            features.push(self.feature()?);
        }
        Ok(features)
    }

    fn at_feature_start(&mut self) -> bool {
        let kws = ["constraint", "record", "int", "real", "bool"];
        let mut hit = false;
        for kw in kws {
            hit |= self.check_kw(kw);
        }
        self.note("identifier".into());
        hit || matches!(self.peek(), Tok::Ident(_))
    }

    fn feature(&mut self) -> Result<Feature, ParseError> {
        if self.check_kw("constraint") {
            return self.zone().map(Feature::Zone);
        }
        if self.check_kw("record") {
            return self.record().map(Feature::Record);
        }
        let is_const = matches!(self.peek(), Tok::Keyword("int" | "real" | "bool"))
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Punct(":=");
        if is_const {
            return self.const_decl().map(Feature::Constant);
        }
        self.var_decl().map(Feature::Variable)
    }

    fn record(&mut self) -> Result<Record, ParseError> {
        let span = self.span();
        self.expect_kw("record")?;
        let name = self.ident()?;
        let array = self.opt_dims()?;
        let features = self.feature_block()?;
        Ok(Record { name, array, features, span })
    }

    fn var_decl(&mut self) -> Result<Variable, ParseError> {
        let span = self.span();
        let ty = self.type_ref()?;
        let is_set = self.eat_kw("set");
        let name = self.ident()?;
        let array = self.opt_dims()?;
        let domain = if self.eat_kw("in") { Some(self.domain()?) } else { None };
        self.expect_punct(";")?;
        Ok(Variable { name, ty, is_set, array, domain, span })
    }

    fn opt_dims(&mut self) -> Result<Option<ArrayDims>, ParseError> {
        if !self.eat_punct("[") {
            return Ok(None);
        }
        let n = self.expr()?;
        let m = if self.eat_punct(",") { Some(self.expr()?) } else { None };
        self.expect_punct("]")?;
        Ok(Some(ArrayDims { n, m }))
    }

    fn domain(&mut self) -> Result<Domain, ParseError> {
        if self.eat_punct("[") {
            let lower = self.expr()?;
            self.expect_punct(",")?;
            let upper = self.expr()?;
            self.expect_punct("]")?;
            Ok(Domain::Interval { lower, upper })
        } else if self.eat_punct("{") {
            let mut values = Vec::new();
            if !self.eat_punct("}") {
                values.push(self.expr()?);
                while self.eat_punct(",") {
                    values.push(self.expr()?);
                }
                self.expect_punct("}")?;
            }
            Ok(Domain::Set(values))
        } else {
            let lower = self.expr()?;
            self.expect_punct("..")?;
            let upper = self.expr()?;
            Ok(Domain::Interval { lower, upper })
        }
    }

    fn zone(&mut self) -> Result<ConstraintZone, ParseError> {
        let span = self.span();
        self.expect_kw("constraint")?;
        let name = self.ident()?;
        let body = self.block()?;
        Ok(ConstraintZone { name, body, origin: ZoneOrigin::Declared, span })
    }

    fn block(&mut self) -> Result<Vec<Statement>, ParseError> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.eat_punct("}") {
            body.push(self.statement()?);
        }
        Ok(body)
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let span = self.span();
        if self.eat_kw("forall") {
            // Both `forall(i in a..b)` and `forall i in [a,b]` are accepted.
            let (index, lower, upper) = if self.eat_punct("(") {
                let index = self.ident()?;
                self.expect_kw("in")?;
                let lower = self.expr()?;
                self.expect_punct("..")?;
                let upper = self.expr()?;
                self.expect_punct(")")?;
                (index, lower, upper)
            } else {
                let index = self.ident()?;
                self.expect_kw("in")?;
                self.expect_punct("[")?;
                let lower = self.expr()?;
                self.expect_punct(",")?;
                let upper = self.expr()?;
                self.expect_punct("]")?;
                (index, lower, upper)
            };
            let body = self.block()?;
            return Ok(Statement::Forall { index, lower, upper, body, span });
        }
        if self.eat_kw("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then_body = self.block()?;
            let else_body = if self.eat_kw("else") { Some(self.block()?) } else { None };
            return Ok(Statement::If { cond, then_body, else_body, span });
        }
        let expr = self.expr()?;
        self.expect_punct(";")?;
        Ok(Statement::Constraint { expr, span })
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        self.implies()
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let lhs = self.or()?;
        if self.eat_kw("implies") {
            let rhs = self.implies()?;
            return Ok(Expr::binary(BinOp::Implies, lhs, rhs).with_span(span));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let mut lhs = self.and()?;
        while self.eat_kw("or") {
            let rhs = self.and()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs).with_span(span.clone());
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let mut lhs = self.not()?;
        while self.eat_kw("and") {
            let rhs = self.not()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs).with_span(span.clone());
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        if self.eat_kw("not") {
            let arg = self.not()?;
            return Ok(Expr::unary(UnOp::Not, arg).with_span(span));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let mut lhs = self.intersect()?;
        loop {
            let op = [
                ("=", BinOp::Eq),
                ("!=", BinOp::Ne),
                ("<=", BinOp::Le),
                (">=", BinOp::Ge),
                ("<", BinOp::Lt),
                (">", BinOp::Gt),
            ]
            .into_iter()
            .find(|(p, _)| self.check_punct(p));
            let Some((_, op)) = op else { return Ok(lhs) };
            self.bump();
            let rhs = self.intersect()?;
            lhs = Expr::binary(op, lhs, rhs).with_span(span.clone());
        }
    }

    fn intersect(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let mut lhs = self.additive()?;
        while self.eat_kw("intersect") {
            let rhs = self.additive()?;
            lhs = Expr::new(ExprKind::Intersect(Box::new(lhs), Box::new(rhs))).with_span(span.clone());
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.eat_punct("+") {
                BinOp::Add
            } else if self.eat_punct("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs).with_span(span.clone());
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_punct("*") {
                BinOp::Mul
            } else if self.eat_punct("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs).with_span(span.clone());
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        if self.eat_punct("-") {
            // A minus directly before a number is part of the literal.
            match self.peek().clone() {
                Tok::Int(v) => {
                    self.bump();
                    return Ok(Expr::int(-v).with_span(span));
                }
                Tok::Real(v) => {
                    self.bump();
                    return Ok(Expr::new(ExprKind::Real(-v)).with_span(span));
                }
                _ => {}
            }
            let arg = self.unary()?;
            return Ok(Expr::unary(UnOp::Neg, arg).with_span(span));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        self.note("expression".into());
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::int(v).with_span(span))
            }
            Tok::Real(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Real(v)).with_span(span))
            }
            Tok::Keyword("true") => {
                self.bump();
                Ok(Expr::boolean(true).with_span(span))
            }
            Tok::Keyword("false") => {
                self.bump();
                Ok(Expr::boolean(false).with_span(span))
            }
            Tok::Keyword("card") => {
                self.bump();
                self.expect_punct("(")?;
                let arg = self.expr()?;
                self.expect_punct(")")?;
                Ok(Expr::new(ExprKind::Card(Box::new(arg))).with_span(span))
            }
            Tok::Punct("(") => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            Tok::Ident(_) => {
                let mut path = vec![self.access_step()?];
                while self.eat_punct(".") {
                    path.push(self.access_step()?);
                }
                Ok(Expr::new(ExprKind::Ref(path)).with_span(span))
            }
            _ => Err(self.error()),
        }
    }

    fn access_step(&mut self) -> Result<AccessStep, ParseError> {
        let name = self.ident()?;
        let mut indices = Vec::new();
        if self.eat_punct("[") {
            indices.push(self.expr()?);
            if self.eat_punct(",") {
                indices.push(self.expr()?);
            }
            self.expect_punct("]")?;
        }
        Ok(AccessStep { name, indices })
    }
}
