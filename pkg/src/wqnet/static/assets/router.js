// Path-based page selection; the server serves index.html for every
// non-API path, so deep links land here and unknown routes fall back home.
export function resolvePage(pathname) {
    const clean = pathname.replace(/\/+$/, "") || "/";
    if (clean === "/classify")
        return "classify";
    if (clean === "/predict")
        return "predict";
    return "home";
}
export function pagePath(page) {
    return page === "home" ? "/" : `/${page}`;
}
