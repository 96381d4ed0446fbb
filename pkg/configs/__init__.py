# configs package init
