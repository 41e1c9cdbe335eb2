macro_rules! examples {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(
            #[allow(dead_code)]
            #[path = $file]
            mod $name;
        )*

        mod run {
            $(
                #[test]
                fn $name() {
                    super::$name::run_example().expect("example runs");
                }
            )*
        }
    };
}

examples!(
    spaces => "../examples/spaces.rs",
    numerical_radius => "../examples/numerical_radius.rs",
    operator_norm => "../examples/operator_norm.rs",
    lie_algebra => "../examples/lie_algebra.rs",
    quotient_norm => "../examples/quotient_norm.rs",
    numerical_index => "../examples/numerical_index.rs",
    second_index => "../examples/second_index.rs",
    shift_lemma => "../examples/shift_lemma.rs",
    ck_model => "../examples/ck_model.rs",
    reproduction_suite => "../examples/reproduction_suite.rs",
);
