//! Well-known namespaces and terms.

macro_rules! terms {
    ($ns:literal; $($name:ident => $local:literal),* $(,)?) => {
        pub const NAMESPACE: &str = $ns;
        $(
            pub fn $name() -> $crate::rdf::Iri {
                static CELL: std::sync::LazyLock<$crate::rdf::Iri> = std::sync::LazyLock::new(|| {
                    $crate::rdf::Iri::from_static(concat!($ns, $local))
                });
                CELL.clone()
            }
        )*
    };
}

pub mod rdf {
    terms!("http://www.w3.org/1999/02/22-rdf-syntax-ns#";
        type_ => "type",
        property => "Property",
        lang_string => "langString",
    );
}

pub mod rdfs {
    terms!("http://www.w3.org/2000/01/rdf-schema#";
        class => "Class",
        label => "label",
        comment => "comment",
        sub_class_of => "subClassOf",
        sub_property_of => "subPropertyOf",
        domain => "domain",
        range => "range",
        is_defined_by => "isDefinedBy",
        literal => "Literal",
    );
}

pub mod owl {
    terms!("http://www.w3.org/2002/07/owl#";
        class => "Class",
        object_property => "ObjectProperty",
        datatype_property => "DatatypeProperty",
        named_individual => "NamedIndividual",
    );
}

pub mod xsd {
    terms!("http://www.w3.org/2001/XMLSchema#";
        string => "string",
        date_time => "dateTime",
        integer => "integer",
        decimal => "decimal",
        double => "double",
        boolean => "boolean",
    );
}

pub mod skos {
    terms!("http://www.w3.org/2004/02/skos/core#";
        concept => "Concept",
    );
}

/// Namespaces whose terms belong to the modelling languages themselves
/// rather than to any domain vocabulary.
pub const META_NAMESPACES: [&str; 5] = [
    rdf::NAMESPACE,
    rdfs::NAMESPACE,
    owl::NAMESPACE,
    xsd::NAMESPACE,
    skos::NAMESPACE,
];

pub fn is_meta_term(iri: &crate::rdf::Iri) -> bool {
    META_NAMESPACES
        .iter()
        .any(|ns| iri.as_str().starts_with(ns))
}

/// Prefix bindings added to every graph the toolkit writes.
pub fn standard_prefixes() -> [(&'static str, &'static str); 5] {
    [
        ("rdf", rdf::NAMESPACE),
        ("rdfs", rdfs::NAMESPACE),
        ("owl", owl::NAMESPACE),
        ("xsd", xsd::NAMESPACE),
        ("skos", skos::NAMESPACE),
    ]
}
