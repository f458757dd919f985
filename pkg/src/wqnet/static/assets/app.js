// DOM wiring for the three pages. All pages are built once and kept in the
// tree, so entered values survive navigation within a session.
import { classify, predict } from "./api.js";
import { classifyView, predictView } from "./format.js";
import { pagePath, resolvePage } from "./router.js";
import { FIELDS, FIELD_LABELS, validate } from "./validation.js";
const PAGE_TITLES = {
    home: "Home",
    classify: "WQI Classification",
    predict: "WQI Prediction",
};
function el(doc, tag, className, text) {
    const node = doc.createElement(tag);
    if (className)
        node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
function buildHomePage(doc) {
    const section = el(doc, "section", "page page-home");
    section.appendChild(el(doc, "h1", undefined, "Water Quality Predictor"));
    const intro = el(doc, "p", undefined, "Enter four water quality measurements to classify the water as " +
        "Good, Average, or Poor, or to predict its numeric quality index.");
    section.appendChild(intro);
    return section;
}
function buildToolPage(doc, kind, fetchFn) {
    const section = el(doc, "section", `page page-${kind}`);
    section.appendChild(el(doc, "h1", undefined, PAGE_TITLES[kind === "classify" ? "classify" : "predict"]));
    const form = el(doc, "form", "measure-form");
    form.setAttribute("novalidate", "");
    const inputs = {};
    for (const field of FIELDS) {
        const row = el(doc, "label", "field-row");
        row.appendChild(el(doc, "span", "field-name", FIELD_LABELS[field]));
        const input = el(doc, "input", "field-input");
        input.name = field;
        input.type = "text";
        input.autocomplete = "off";
        inputs[field] = input;
        row.appendChild(input);
        form.appendChild(row);
    }
    const button = el(doc, "button", "submit", kind === "classify" ? "Classify" : "Predict");
    button.type = "submit";
    button.disabled = true;
    form.appendChild(button);
    section.appendChild(form);
    const banner = el(doc, "div", "banner");
    banner.hidden = true;
    section.appendChild(banner);
    const result = el(doc, "div", "result");
    section.appendChild(result);
    let pending = false;
    const currentValues = () => {
        const values = {};
        for (const field of FIELDS)
            values[field] = inputs[field].value;
        return values;
    };
    const refreshValidity = () => {
        const validity = validate(currentValues());
        for (const field of FIELDS) {
            const filled = inputs[field].value.trim() !== "";
            inputs[field].classList.toggle("invalid", filled && !validity.perField[field]);
        }
        button.disabled = pending || !validity.allValid;
        return validity;
    };
    for (const field of FIELDS) {
        inputs[field].addEventListener("input", refreshValidity);
    }
    const showError = (message) => {
        banner.textContent = message;
        banner.hidden = false;
        result.replaceChildren();
    };
    const showClassification = (label, tone, lines) => {
        banner.hidden = true;
        const badge = el(doc, "span", `badge badge-${tone}`, label);
        const list = el(doc, "ul", "probabilities");
        for (const line of lines)
            list.appendChild(el(doc, "li", undefined, line));
        result.replaceChildren(badge, list);
    };
    const showPrediction = (text, tone) => {
        banner.hidden = true;
        const value = el(doc, "strong", `wqi-value badge-${tone}`, text);
        result.replaceChildren(value);
    };
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        void submit();
    });
    async function submit() {
        const validity = refreshValidity();
        if (pending || !validity.allValid || validity.numbers === null) {
            return; // the client never sends an invalid request
        }
        pending = true;
        button.disabled = true;
        try {
            if (kind === "classify") {
                const outcome = await classify(validity.numbers, fetchFn);
                if (outcome.ok) {
                    const view = classifyView(outcome.data);
                    showClassification(view.label, view.tone, view.probabilityLines);
                }
                else {
                    showError(outcome.error);
                }
            }
            else {
                const outcome = await predict(validity.numbers, fetchFn);
                if (outcome.ok) {
                    const view = predictView(outcome.data);
                    showPrediction(view.text, view.tone);
                }
                else {
                    showError(outcome.error);
                }
            }
        }
        finally {
            pending = false;
            refreshValidity();
        }
    }
    return section;
}
export function mountApp(root, fetchFn = fetch) {
    const doc = root.ownerDocument;
    const win = doc.defaultView;
    const nav = el(doc, "nav", "topbar");
    const links = {};
    for (const page of ["home", "classify", "predict"]) {
        const link = el(doc, "a", "nav-link", PAGE_TITLES[page]);
        link.href = pagePath(page);
        links[page] = link;
        nav.appendChild(link);
    }
    root.replaceChildren(nav);
    const pages = {
        home: buildHomePage(doc),
        classify: buildToolPage(doc, "classify", fetchFn),
        predict: buildToolPage(doc, "predict", fetchFn),
    };
    for (const page of Object.values(pages)) {
        page.hidden = true;
        root.appendChild(page);
    }
    let active = "home";
    const show = (page) => {
        pages[active].hidden = true;
        links[active].classList.remove("active");
        active = page;
        pages[active].hidden = false;
        links[active].classList.add("active");
    };
    const navigate = (page) => {
        win.history.pushState({}, "", pagePath(page));
        show(page);
    };
    for (const page of ["home", "classify", "predict"]) {
        links[page].addEventListener("click", (event) => {
            event.preventDefault();
            navigate(page);
        });
    }
    win.addEventListener("popstate", () => show(resolvePage(win.location.pathname)));
    show(resolvePage(win.location.pathname));
    return { navigate, currentPage: () => active };
}
