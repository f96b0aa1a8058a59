def execute_command(image):
    image_patch = ImagePatch(image)
    fountain_patches = image_patch.find('fountain')
    if len(fountain_patches) == 0:
        return {'function': 'None', 'error': 'No fountain found.'}
    fountain = fountain_patches[0]
    candidates = []
    for planter in image_patch.find('planter'):
        if planter.horizontal_center < fountain.horizontal_center:
            candidates.append(planter)
    if len(candidates) == 0:
        return {'function': 'None', 'error': 'No planter to the left of the fountain.'}
    candidates.sort(key=lambda x: x.horizontal_center)
    planter = candidates[-1]
    return {'function': 'navigate_to_object', 'inputs': (planter.horizontal_center, planter.vertical_center), 'box': [planter.left, planter.lower, planter.right, planter.upper]}
