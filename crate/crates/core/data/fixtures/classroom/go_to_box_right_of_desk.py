def execute_command(image):
    image_patch = ImagePatch(image)
    desk_patches = image_patch.find('teacher desk')
    if len(desk_patches) == 0:
        return {'function': 'None', 'error': 'No teacher desk found.'}
    desk = desk_patches[0]
    candidates = []
    for box in image_patch.find('box'):
        if box.horizontal_center > desk.horizontal_center:
            candidates.append(box)
    if len(candidates) == 0:
        return {'function': 'None', 'error': 'No box to the right of the teacher desk.'}
    candidates.sort(key=lambda x: x.horizontal_center)
    box = candidates[0]
    return {'function': 'navigate_to_object', 'inputs': (box.horizontal_center, box.vertical_center), 'box': [box.left, box.lower, box.right, box.upper]}
